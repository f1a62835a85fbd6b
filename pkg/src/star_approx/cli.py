"""Command-line client for the sweep/bounds/verify service.

By default the CLI talks to an in-process instance of the service (no
network, nothing to start); ``--server URL`` points it at a running
instance instead. Exit codes: 0 success, 1 check failure, 2 usage or
configuration error, 3 numerical failure.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click
import httpx

from . import __version__
from .errors import ConfigError
from .problems import ZOO, load_config

EXIT_CHECK_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class _AsgiSyncTransport(httpx.BaseTransport):
    """Bridge a sync httpx client onto the in-process ASGI app."""

    def __init__(self, app):
        self._inner = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        import asyncio

        async def go():
            resp = await self._inner.handle_async_request(request)
            await resp.aread()
            return resp

        resp = asyncio.run(go())
        return httpx.Response(status_code=resp.status_code,
                              headers=resp.headers, content=resp.content)


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=900.0)
    from .service.app import create_app
    return httpx.Client(transport=_AsgiSyncTransport(create_app()),
                        base_url="http://star-approx.internal", timeout=900.0)


def _fail_from_response(resp: httpx.Response):
    try:
        payload = resp.json()
        message = payload.get("error", payload).get("message", resp.text)
    except Exception:
        message = resp.text
    click.echo(f"error: {message}", err=True)
    if resp.status_code in (400, 404, 422):
        sys.exit(EXIT_CONFIG)
    sys.exit(EXIT_NUMERICAL)


def _parse_degrees(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise click.BadParameter(f"expected 'a..b', got {text!r}")


def _config_payload(source: str) -> dict:
    if source in ZOO:
        return {"problem": source}
    cfg = load_config(source)
    return {"config": cfg.to_dict()}


@click.group()
@click.version_option(version=__version__, prog_name="star-approx")
@click.option("--server", default=None, envvar="STAR_APPROX_SERVER",
              help="URL of a running service; default runs in process.")
@click.pass_context
def main(ctx, server):
    """Degree sweeps and invariant verification for propagator approximation."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


def _apply_overrides(payload: dict, degrees, tol, chi):
    overrides = {}
    if degrees is not None:
        overrides["degrees"] = _parse_degrees(degrees)
    if tol is not None:
        overrides["tol"] = tol
    if chi is not None:
        overrides["chi"] = "optimize" if chi == "optimize" else float(chi)
    if overrides:
        payload["overrides"] = overrides
    return payload


def _write_outputs(out: pathlib.Path, csv_text: str, manifest: dict):
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text, encoding="utf-8")
    manifest_path = out.with_suffix("").with_name(out.with_suffix("").name
                                                  + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True)
                             + "\n", encoding="utf-8")
    return manifest_path


def _print_sweep_table(rows, bound_asserted: bool):
    header = (f"{'n':>3} {'measured':>12} {'channel':>12} {'E_n bound':>12} "
              f"{'bern fixed':>12} {'bern opt':>12}")
    click.echo(header)
    for r in rows:
        click.echo(f"{r['n']:>3} {r['measured_l2']:>12.4e} "
                   f"{r['channel_bound']:>12.4e} {r['En_bound']:>12.4e} "
                   f"{r['bernstein_fixed']:>12.4e} {r['bernstein_opt']:>12.4e}")
    note = ("bound asserted (commutation hypothesis satisfied)"
            if bound_asserted else
            "bound NOT asserted: commutation hypothesis violated")
    click.echo(note)


@main.command()
@click.argument("config")
@click.option("--degrees", default=None, help="Degree range a..b.")
@click.option("--tol", type=float, default=None, help="Representation tolerance.")
@click.option("--chi", default=None,
              help="Ellipse parameter for the fixed bound column, or 'optimize'.")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="CSV output path (manifest written next to it).")
@click.option("--threads", type=int, default=None, envvar="STAR_APPROX_THREADS",
              help="Worker threads across degrees.")
@click.option("--timing", is_flag=True, default=False,
              help="Write measured wall_ms into the CSV (breaks byte "
                   "reproducibility; timings are always in the manifest).")
@click.pass_context
def sweep(ctx, config, degrees, tol, chi, out_path, threads, timing):
    """Run the degree sweep for CONFIG (bundled name or JSON file)."""
    try:
        payload = _config_payload(config)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    payload = _apply_overrides(payload, degrees, tol, chi)
    payload["threads"] = threads or 1
    payload["include_timing"] = timing
    with _client(ctx.obj["server"]) as client:
        resp = client.post("/api/sweep", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        data = resp.json()
    name = data["manifest"]["problem"].get("name") or "problem"
    out = pathlib.Path(out_path) if out_path else pathlib.Path(f"{name}_sweep.csv")
    manifest_path = _write_outputs(out, data["csv"], data["manifest"])
    _print_sweep_table(data["rows"], data["bound_asserted"])
    click.echo(f"wrote {out} and {manifest_path}")


@main.command()
@click.argument("config")
@click.option("--degrees", default=None, help="Degree range a..b.")
@click.option("--chi", default=None,
              help="Ellipse parameter for the fixed bound column, or 'optimize'.")
@click.option("--out", "out_path", default=None, type=click.Path())
@click.pass_context
def bounds(ctx, config, degrees, chi, out_path):
    """Bound columns only (no ODE solve) for CONFIG."""
    try:
        payload = _config_payload(config)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    payload = _apply_overrides(payload, degrees, None, chi)
    with _client(ctx.obj["server"]) as client:
        resp = client.post("/api/bounds", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        data = resp.json()
    click.echo(f"spectral interval: {data['spectral_interval']}")
    for r in data["rows"]:
        click.echo(f"n={r['n']:>2}  E_n*L={r['En_bound']:.4e}  "
                   f"fixed={r['bernstein_fixed']:.4e}  "
                   f"opt={r['bernstein_opt']:.4e}")
    if out_path:
        out = pathlib.Path(out_path)
        manifest_path = _write_outputs(out, data["csv"], data["manifest"])
        click.echo(f"wrote {out} and {manifest_path}")


@main.command()
@click.argument("suite", type=click.Choice(
    ["kernel", "starcalc", "spectral", "norms", "approx", "all"]))
@click.pass_context
def verify(ctx, suite):
    """Run an invariant suite; nonzero exit on any failed check."""
    with _client(ctx.obj["server"]) as client:
        resp = client.post("/api/verify", json={"suite": suite})
        if resp.status_code != 200:
            _fail_from_response(resp)
        data = resp.json()
    for check in data["checks"]:
        mark = "PASS" if check["passed"] else "FAIL"
        click.echo(f"[{mark}] {check['name']} ({check['ms']:.0f} ms)"
                   + (f" - {check['detail']}" if check["detail"] else ""))
    if not data["passed"]:
        click.echo(f"suite {suite}: FAILED", err=True)
        sys.exit(EXIT_CHECK_FAILURE)
    click.echo(f"suite {suite}: ok")


@main.command()
@click.option("--out", "out_dir", default="star-approx-demo",
              type=click.Path(file_okay=False))
@click.pass_context
def demo(ctx, out_dir):
    """Sweep the bundled commuting demo problem and print the chain table."""
    payload = {"problem": "commuting_demo",
               "overrides": {"degrees": (0, 8)}, "threads": 1}
    with _client(ctx.obj["server"]) as client:
        resp = client.post("/api/sweep", json=payload)
        if resp.status_code != 200:
            _fail_from_response(resp)
        data = resp.json()
    out = pathlib.Path(out_dir) / "commuting_demo_sweep.csv"
    manifest_path = _write_outputs(out, data["csv"], data["manifest"])
    _print_sweep_table(data["rows"], data["bound_asserted"])
    chain = data["manifest"]["chain"]
    ok = all(c["holds"] for c in chain)
    click.echo(f"chain inequalities: {'all pass' if ok else 'FAILED'}")
    click.echo(f"wrote {out} and {manifest_path}")
    if not ok:
        sys.exit(EXIT_CHECK_FAILURE)


@main.command()
@click.pass_context
def problems(ctx):
    """List the bundled problems."""
    with _client(ctx.obj["server"]) as client:
        resp = client.get("/api/problems")
        if resp.status_code != 200:
            _fail_from_response(resp)
        for p in resp.json():
            click.echo(f"{p['name']:>18}  dim={p['dimension']}  "
                       f"I={p['interval']}  {p['description']}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8750)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn
    from .service.app import create_app
    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
