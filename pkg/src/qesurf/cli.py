"""Command-line client for the qesurf service.

By default commands run against an in-process instance of the HTTP service;
``--server URL`` points them at a remote instance instead.  Exit codes:
0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys

import click

_SIG = 12  # significant digits for numeric output


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.{_SIG}g}"
    return str(v)


class _Client:
    """Minimal HTTP client: in-process by default, remote with --server."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from . import service

            self._client = TestClient(service.app)

    def get(self, path: str) -> dict:
        return self._unwrap(self._client.get(path))

    def post(self, path: str, payload: dict) -> dict:
        return self._unwrap(self._client.post(path, json=payload))

    @staticmethod
    def _unwrap(resp) -> dict:
        if resp.status_code == 422:
            detail = resp.json().get("detail", "invalid request")
            if not isinstance(detail, str):
                detail = json.dumps(detail)
            raise click.UsageError(detail)
        if resp.status_code >= 400:
            raise click.ClickException(f"service error {resp.status_code}: {resp.text}")
        return resp.json()


def _model_arg(model: str, c, kappa, theta) -> dict:
    """Build the model reference for a request from CLI arguments."""
    params = {}
    if c is not None:
        params["c"] = c
    if kappa is not None:
        params["kappa"] = kappa
    if theta is not None:
        params["theta"] = theta
    text = model
    if os.path.isfile(model):
        with open(model, encoding="utf-8") as fh:
            text = fh.read()
    if text.strip().startswith("{"):
        try:
            return {"model": json.loads(text), "params": params}
        except json.JSONDecodeError as exc:
            raise click.UsageError(f"invalid model JSON: {exc}")
    return {"model": text, "params": params}


_model_options = [
    click.option("--c", type=float, default=None, help="family parameter c"),
    click.option("--kappa", type=float, default=None, help="family parameter kappa"),
    click.option("--theta", type=float, default=None, help="family parameter theta"),
]


def _with_model_options(fn):
    for opt in reversed(_model_options):
        fn = opt(fn)
    return fn


@click.group()
@click.option("--server", default=None, help="URL of a running service (default: in-process)")
@click.pass_context
def main(ctx, server):
    """Quasi-Einstein toolkit for homogeneous affine surfaces."""
    ctx.obj = _Client(server)


@main.command("list")
@click.pass_obj
def list_cmd(client):
    """List registry labels and parametrized family names."""
    data = client.get("/models")
    click.echo("registry entries:")
    for label in data["labels"]:
        click.echo(f"  {label}")
    click.echo("parametrized families (use --c/--kappa/--theta):")
    click.echo("  " + " ".join(data["families"]))


@main.command()
@click.argument("model")
@_with_model_options
@click.pass_obj
def info(client, model, c, kappa, theta):
    """Invariants, Killing dimension and structural flags of a model."""
    data = client.post("/info", _model_arg(model, c, kappa, theta))
    kind = data["model"]["kind"]
    click.echo(f"kind: {kind}")
    table = data["model"].get("Gamma") or data["model"].get("C")
    if table:
        body = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(table.items()) if v != 0.0)
        click.echo(f"coefficients: {body or '0'}")
    click.echo(f"flat: {data['flat']}")
    click.echo(f"strongly_projectively_flat: {data['strongly_projectively_flat']}")
    click.echo(f"ricci_rank: {data['ricci_rank']}")
    click.echo(f"ricci_signature: {data['ricci_signature']}")
    click.echo(f"killing_dim: {data['killing_dim']}")
    for key in ("psi", "Psi", "alpha_X", "eps_X", "on_line_L"):
        if data.get(key) is not None:
            click.echo(f"{key}: {_fmt(data[key])}")


@main.command()
@click.argument("model")
@click.option("--mu", type=float, required=True, help="eigenvalue")
@_with_model_options
@click.pass_obj
def solve(client, model, mu, c, kappa, theta):
    """Solution basis of the quasi-Einstein equation at the eigenvalue mu."""
    payload = _model_arg(model, c, kappa, theta)
    payload["mu"] = mu
    data = client.post("/solve", payload)
    click.echo(f"mu: {_fmt(data['mu'])}")
    click.echo(f"dim: {data['dim']}")
    click.echo(f"residual: {_fmt(data['residual'])}")
    for f in data["basis"]:
        click.echo(f)


@main.command("special-mu")
@click.argument("model")
@_with_model_options
@click.pass_obj
def special_mu(client, model, c, kappa, theta):
    """Candidate eigenvalues with nontrivial solutions (half-plane models)."""
    data = client.post("/special-mu", _model_arg(model, c, kappa, theta))
    for cand in data["candidates"]:
        mu = "skipped" if cand["mu"] is None else _fmt(cand["mu"])
        line = f"mu: {mu}  dim: {cand['dim']}  source: {cand['source']}"
        if cand["note"]:
            line += f"  note: {cand['note']}"
        click.echo(line)


@main.command("killing-dim")
@click.argument("model")
@_with_model_options
@click.pass_obj
def killing_dim(client, model, c, kappa, theta):
    """Dimension of the affine Killing algebra."""
    data = client.post("/killing-dim", _model_arg(model, c, kappa, theta))
    click.echo(str(data["killing_dim"]))


@main.command()
@click.argument("model")
@click.option("--mu", type=float, required=True, help="eigenvalue of the base solution")
@click.option("--phi", default="zero", type=click.Choice(["zero", "ricci"]),
              help="deformation block of the extension metric")
@click.option("--f", "fn", default=None, help="explicit eigenfunction (canonical text form)")
@_with_model_options
@click.pass_obj
def extend(client, model, mu, phi, fn, c, kappa, theta):
    """Cotangent-bundle extension: isotropic quasi-Einstein residual report."""
    payload = _model_arg(model, c, kappa, theta)
    payload.update({"mu": mu, "phi": phi})
    if fn is not None:
        payload["f"] = fn
    data = client.post("/extend", payload)
    click.echo(f"mu: {_fmt(data['mu'])}")
    click.echo(f"f: {data['f']}")
    click.echo(f"phi: {data['phi']}")
    click.echo(f"residual_qe: {_fmt(data['residual_qe'])}")
    click.echo(f"residual_null: {_fmt(data['residual_null'])}")
    if data["kahler"] is not None:
        click.echo(f"kahler_nabla_J: {_fmt(data['kahler']['nabla_J'])}")
        click.echo(f"kahler_J_squared: {_fmt(data['kahler']['J_squared'])}")
    ok = data["residual_qe"] < 1e-5 and data["residual_null"] < 1e-8
    click.echo("status: pass" if ok else "status: FAIL")
    if not ok:
        sys.exit(1)


@main.command()
@click.argument("model")
@_with_model_options
@click.pass_obj
def classify(client, model, c, kappa, theta):
    """Classify a model (JSON file, inline JSON, or registry label)."""
    data = client.post("/classify", _model_arg(model, c, kappa, theta))
    line = data["family"]
    if data["parameters"]:
        line += "  " + "  ".join(f"{k}={_fmt(v)}" for k, v in sorted(data["parameters"].items()))
    click.echo(line)
    for note in data["notes"]:
        click.echo(f"note: {note}")


@main.command("verify-paper")
@click.option("--only", multiple=True, help="glob filter on entry labels (repeatable)")
@click.option("--json", "json_path", default=None, help="write the full report as JSON")
@click.pass_obj
def verify_paper(client, only, json_path):
    """Re-derive and check every registry entry; nonzero exit on failure."""
    payload = {"only": list(only) if only else None}
    data = client.post("/verify", payload)
    for warning in data["summary"].get("warnings", []):
        click.echo(f"warning: {warning}", err=True)
    for entry in data["entries"]:
        failed = [c for c in entry["checks"] if not c["pass"]]
        status = "ok" if not failed else "FAIL"
        click.echo(f"{entry['label']}: {status} ({len(entry['checks'])} checks)")
        for chk in failed:
            res = "" if chk["residual"] is None else f"  residual={_fmt(chk['residual'])}"
            click.echo(f"  FAIL {chk['name']}{res}  [{chk['cite']}]")
    s = data["summary"]
    click.echo(
        f"summary: {s['entries']} entries, {s['passed']}/{s['checks']} checks passed"
    )
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not s["ok"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
