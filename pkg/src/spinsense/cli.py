"""Command-line client for the spinsense service.

By default every command talks to an in-process instance of the HTTP app
(no server or environment required); pass ``--server URL`` to target a
running deployment instead.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import asyncio
import json
from typing import Optional

import click
import httpx

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class CliFailure(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


def _request(server: Optional[str], method: str, path: str, payload) -> httpx.Response:
    try:
        if server:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                return client.request(method, path, json=payload)

        from .service.app import create_app

        async def run():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://spinsense.local", timeout=None
            ) as client:
                return await client.request(method, path, json=payload)

        return asyncio.run(run())
    except httpx.HTTPError as exc:
        raise CliFailure(f"cannot reach service: {exc}", EXIT_IO)


def _check(response: httpx.Response) -> httpx.Response:
    if response.status_code < 400:
        return response
    try:
        detail = response.json().get("detail")
    except Exception:
        detail = response.text
    if isinstance(detail, dict) and detail.get("kind") == "numerical":
        raise CliFailure(f"numerical failure: {detail.get('message')}", EXIT_NUMERICAL)
    raise CliFailure(f"configuration error: {detail}", EXIT_CONFIG)


def _parse_z(text: str):
    try:
        re_part, im_part = (float(p) for p in text.split(","))
    except Exception:
        raise CliFailure(f"--z expects RE,IM; got {text!r}", EXIT_CONFIG)
    return (re_part, im_part)


@click.group()
@click.option("--server", default=None, help="Base URL of a running spinsense service.")
@click.pass_context
def main(ctx, server):
    """Collective-spin field-sensing simulations."""
    ctx.obj = {"server": server}


@main.command()
@click.option("--kind", type=click.Choice(["coherent", "oat", "tat", "cat", "ghz"]), required=True)
@click.option("--n", "n_qubits", type=int, required=True)
@click.option("--z", default="1,0", help="Coherent label RE,IM.")
@click.option("--chi", type=float, default=None)
@click.option("--chi-opt", is_flag=True, default=False)
@click.pass_context
def state(ctx, kind, n_qubits, z, chi, chi_opt):
    """Print moments, squeezing parameter, and chosen axes as JSON."""
    if chi is not None and chi_opt:
        raise CliFailure("give either --chi or --chi-opt", EXIT_CONFIG)
    payload = {
        "kind": kind,
        "n": n_qubits,
        "z": _parse_z(z),
        "chi": chi,
        "chi_opt": chi_opt,
    }
    response = _check(_request(ctx.obj["server"], "POST", "/state", payload))
    click.echo(json.dumps(response.json(), indent=2))


@main.command()
@click.option("--config", "config_path", type=click.Path(), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--plot", "plot_path", type=click.Path(), default=None)
@click.option("--jobs", type=int, default=None)
@click.pass_context
def sweep(ctx, config_path, out_path, plot_path, jobs):
    """Run a sweep from a JSON config; write CSV (and optionally an SVG plot)."""
    try:
        with open(config_path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise CliFailure(f"cannot read config: {exc}", EXIT_IO)
    except json.JSONDecodeError as exc:
        raise CliFailure(f"config is not valid JSON: {exc}", EXIT_CONFIG)
    # flags win; the config's outputs block is the fallback
    configured = config.get("outputs") or {} if isinstance(config, dict) else {}
    out_path = out_path or configured.get("csv")
    plot_path = plot_path or configured.get("plot")
    if not out_path:
        raise CliFailure("no CSV output path: pass --out or set outputs.csv", EXIT_CONFIG)
    payload = {"config": config, "jobs": jobs}
    response = _check(_request(ctx.obj["server"], "POST", "/sweep", payload))
    csv_text = response.text
    try:
        with open(out_path, "w", newline="") as handle:
            handle.write(csv_text)
    except OSError as exc:
        raise CliFailure(f"cannot write CSV: {exc}", EXIT_IO)
    if plot_path:
        from .errors import SpinSenseError
        from .sweep import emit_plot, rows_from_csv_text

        try:
            emit_plot(rows_from_csv_text(csv_text), plot_path)
        except OSError as exc:
            raise CliFailure(f"cannot write plot: {exc}", EXIT_IO)
        except SpinSenseError as exc:
            raise CliFailure(f"cannot plot: {exc}", EXIT_NUMERICAL)
    click.echo(f"wrote {out_path}" + (f" and {plot_path}" if plot_path else ""))


@main.command()
@click.option("--in", "in_path", type=click.Path(), required=True)
@click.option("--x", "x_column", default="N")
@click.option("--y", "y_column", default="delta_omega")
@click.pass_context
def fit(ctx, in_path, x_column, y_column):
    """Fit a power-law exponent to two CSV columns; print the result as JSON."""
    try:
        with open(in_path, newline="") as handle:
            csv_text = handle.read()
    except OSError as exc:
        raise CliFailure(f"cannot read CSV: {exc}", EXIT_IO)
    payload = {"csv": csv_text, "x": x_column, "y": y_column}
    response = _check(_request(ctx.obj["server"], "POST", "/fit", payload))
    click.echo(json.dumps(response.json(), indent=2))


@main.command()
@click.option("--n", "n_qubits", type=int, required=True)
@click.option("--z", default="1,0", help="Coherent label RE,IM.")
@click.option("--mode", type=click.Choice(["ideal", "time-domain"]), default="ideal")
@click.option("--rabi-ratio", type=float, default=0.05)
@click.option("--omega-t", type=float, required=True)
@click.option("--gamma-t", type=float, required=True)
@click.pass_context
def protocol(ctx, n_qubits, z, mode, rabi_ratio, omega_t, gamma_t):
    """Prepare a cat through the pulse sequence and read out P+."""
    payload = {
        "n": n_qubits,
        "z": _parse_z(z),
        "mode": {"ideal": "ideal_gate", "time-domain": "time_domain"}[mode],
        "rabi_ratio": rabi_ratio,
        "omega_t": omega_t,
        "gamma_t": gamma_t,
    }
    response = _check(_request(ctx.obj["server"], "POST", "/protocol", payload))
    click.echo(json.dumps(response.json(), indent=2))


if __name__ == "__main__":
    main()
