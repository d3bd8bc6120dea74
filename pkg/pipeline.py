"""melcert CLI — Melnikov and monodromy nonintegrability certificates for forced planar Hamiltonian systems."""

from __future__ import annotations

import functools
import json
import logging
import math
from pathlib import Path

import click
import pandas as pd

from melcert.config import settings
from melcert.errors import ConstantSeries, MelcertError, MultiHarmonic, NumericalError, SchemaError
from melcert.models import PlanarSystem, RunConfig

logger = logging.getLogger(__name__)


@click.group()
def cli():
    """melcert — nonintegrability certificates for ẋ = J DH(x) + ε g(x, ωt).

    Pick a system with --preset NAME (duffing1, duffing2) and --beta/--delta/--omega,
    or --input FILE with a JSON definition. Log level comes from SM_LOG.

        \b
        pipeline.py certify     # Melnikov certificate (+ --monodromy)
        pipeline.py melnikov    # coefficient table and M(θ) with zeros
        pipeline.py monodromy   # monodromy pair and commutator
        pipeline.py splitting   # measured splitting vs first-order theory
        pipeline.py sweep       # (β, δ, ω) grid of verdicts and thresholds
        pipeline.py orbit-dump  # separatrix samples
    """
    logging.basicConfig(
        level=getattr(logging, settings.sm_log.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def system_options(fn):
    """--input | --preset with params, output and tolerance flags shared by every command."""
    options = [
        click.option("--input", "input_path", type=click.Path(), default=None, help="System definition JSON."),
        click.option("--preset", default=None, help="Preset name (duffing1, duffing2)."),
        click.option("--beta", type=float, default=None, help="Forcing amplitude (presets)."),
        click.option("--delta", type=float, default=None, help="Damping (presets)."),
        click.option("--omega", type=float, default=None, help="Forcing frequency (presets)."),
        click.option("--out", "out_dir", default=None, help="Output directory."),
        click.option("--threads", type=int, default=None, help="Worker threads (0 = all cores)."),
        click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv", help="Table format."),
        click.option("--tol-coeff", type=float, default=None, help="Melnikov coefficient tolerance."),
        click.option("--tol-cert", type=float, default=None, help="Certificate margin."),
        click.option("--tol-simple", type=float, default=None, help="Simple-zero slope threshold."),
        click.option("--tol-commutator", type=float, default=None, help="Commutator norm threshold."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def reports_errors(fn):
    """Turn any failure into its JSON on stderr and the matching exit code.

    MelcertError carries its own code; anything else unexpected (a solver
    raising LinAlgError, say) is reported as a numerical failure.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except MelcertError as exc:
            click.echo(json.dumps(exc.to_dict(), sort_keys=True), err=True)
            raise SystemExit(exc.exit_code) from None
        except Exception as exc:
            logger.debug("Unexpected failure", exc_info=True)
            payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": NumericalError.exit_code}
            click.echo(json.dumps(payload, sort_keys=True), err=True)
            raise SystemExit(NumericalError.exit_code) from None

    return wrapper


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


@cli.command()
@system_options
@click.option("--monodromy", "with_monodromy", is_flag=True, help="Also run the monodromy commutator test.")
@reports_errors
def certify(with_monodromy, **opts):
    """Certify nonintegrability from the Melnikov coefficients."""
    from melcert.melnikov.certificate import certify_nonintegrability
    from melcert.report import series_report, verdict_label, write_json

    cfg = _run_config("certify", opts, monodromy=with_monodromy)
    sys_ = _load_system(cfg)
    orbit, series = _orbit_and_series(sys_, cfg)
    cert = certify_nonintegrability(series, cfg.tolerances.get("tol_cert"))
    report = _header(cfg, sys_) | series_report(series, cert)
    click.echo(f"Melnikov verdict: {verdict_label(cert.verdict)} (witness {cert.witness}, margin {cert.margin:.3e})")

    if cfg.extra["monodromy"]:
        pair = _monodromy(orbit, sys_, series, cert.witness or 1, cfg)
        report["monodromy"] = {
            "ell": pair.ell,
            "commutator_norm": pair.commutator_norm,
            "verdict": verdict_label(pair.verdict),
            "agrees": pair.verdict == cert.verdict,
        }
        click.echo(f"Monodromy verdict: {verdict_label(pair.verdict)} (commutator norm {pair.commutator_norm:.6e})")

    path = write_json(report, _out_dir(cfg) / "certify.json")
    click.echo(f"Report: {path}")


# ---------------------------------------------------------------------------
# melnikov
# ---------------------------------------------------------------------------


@cli.command()
@system_options
@click.option("--grid", "n_grid", type=int, default=256, help="θ-grid size of the M(θ) table.")
@reports_errors
def melnikov(n_grid, **opts):
    """Write the Melnikov series and a θ-grid table of M(θ) with its zeros."""
    from melcert.melnikov.zeros import simple_zeros
    from melcert.report import melnikov_table, series_report, write_json

    cfg = _run_config("melnikov", opts)
    sys_ = _load_system(cfg)
    _, series = _orbit_and_series(sys_, cfg)
    try:
        zeros = simple_zeros(series, cfg.tolerances.get("tol_simple"))
    except ConstantSeries:
        zeros = []
    out = _out_dir(cfg)
    write_json(_header(cfg, sys_) | series_report(series, zeros=zeros), out / "melnikov_series.json")
    path = _write_table(melnikov_table(series, n_grid, zeros), out / "melnikov", cfg.fmt)
    for j in range(0, series.n + 1):
        click.echo(f"  M_{j} = {series.coeff(j):.12g}  (err {series.error(j):.1e})")
    click.echo(f"{len(zeros)} zeros ({sum(z.simple for z in zeros)} simple). Table: {path}")


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------


@cli.command()
@system_options
@click.option("--ell", type=int, default=None, help="Harmonic (default: the Melnikov witness).")
@click.option("--continuation", is_flag=True, help="Cross-check by complex-time continuation (presets only).")
@reports_errors
def monodromy(ell, continuation, **opts):
    """Monodromy pair around the two saddles and its commutator."""
    from melcert.melnikov.certificate import witness_harmonic
    from melcert.report import monodromy_report, verdict_label, write_json
    from melcert.variational.continuation import monodromy_via_continuation

    cfg = _run_config("monodromy", opts, ell=ell, continuation=continuation)
    sys_ = _load_system(cfg)
    orbit, series = _orbit_and_series(sys_, cfg)
    ell = ell or witness_harmonic(series) or 1
    pair = _monodromy(orbit, sys_, series, ell, cfg)
    extra = {}
    if continuation:
        extra["continuation"] = {
            name: {
                "t0": res.t0,
                "matrix": res.matrix,
                "shear": res.shear,
                "closed_form_gap": res.closed_form_gap,
            }
            for name, res in (
                ("minus", monodromy_via_continuation(sys_, orbit, ell, -1)),
                ("plus", monodromy_via_continuation(sys_, orbit, ell, 1)),
            )
        }
    path = write_json(_header(cfg, sys_) | monodromy_report(pair, extra), _out_dir(cfg) / "monodromy.json")
    click.echo(f"ell={ell}: commutator norm {pair.commutator_norm:.6e} → {verdict_label(pair.verdict)}")
    click.echo(f"Report: {path}")


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------


@cli.command()
@system_options
@click.option("--eps", "eps_grid", type=float, multiple=True, help="Perturbation size (repeatable).")
@click.option("--n-theta", type=int, default=32, help="Number of forcing phases.")
@click.option("--section", type=float, default=0.0, help="Orbit time of the section point.")
@reports_errors
def splitting(eps_grid, n_theta, section, **opts):
    """Measure the separatrix splitting for each ε and compare with ε M(θ)."""
    from melcert.report import convergence_summary, profile_table, write_json
    from melcert.separatrix.orbit import shift_orbit
    from melcert.splitting.profile import profile_error, splitting_profile, theta_grid

    if not eps_grid:
        raise SchemaError("splitting needs at least one --eps value")
    if n_theta < 1:
        raise SchemaError(f"--n-theta must be positive, got {n_theta}")
    cfg = _run_config("splitting", opts, section=section)
    cfg.sweep["eps"] = list(eps_grid)
    sys_ = _load_system(cfg)
    orbit, _ = _orbit_and_series(sys_, cfg, with_series=False)
    orbit = shift_orbit(orbit, -section) if section else orbit
    _, series = _orbit_and_series(sys_, cfg, orbit=orbit)

    thetas = theta_grid(n_theta)
    tables, errors = [], []
    for eps in eps_grid:
        points = splitting_profile(sys_, eps, thetas, orbit=orbit, series=series, threads=cfg.threads)
        tables.append(profile_table(points, eps))
        errors.append(profile_error(points))
        click.echo(f"  eps={eps:.3g}: max |d·|DH|/eps - M| = {errors[-1]:.6e}")
    out = _out_dir(cfg)
    path = _write_table(pd.concat(tables, ignore_index=True), out / "splitting", cfg.fmt)
    summary = convergence_summary(list(eps_grid), errors)
    write_json(_header(cfg, sys_) | summary, out / "splitting_summary.json")
    if summary["fitted_order"] is not None:
        click.echo(f"Fitted order: {summary['fitted_order']:.3f}")
    click.echo(f"Profile: {path}")


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


@cli.command()
@system_options
@click.option("--beta-grid", type=float, multiple=True, help="β values (repeatable).")
@click.option("--delta-grid", type=float, multiple=True, help="δ values (repeatable).")
@click.option("--omega-grid", type=float, multiple=True, help="ω values (repeatable).")
@reports_errors
def sweep(beta_grid, delta_grid, omega_grid, **opts):
    """Verdicts, zero-existence ratios and threshold crossings over a preset's (β, δ, ω) grid."""
    from melcert.parallel import run_parallel

    cfg = _run_config("sweep", opts)
    if cfg.preset is None:
        raise SchemaError("sweep runs over a preset's parameters; pass --preset")
    cfg.sweep = {
        "beta": list(beta_grid) or [cfg.params.get("beta", 1.0)],
        "delta": list(delta_grid) or [cfg.params.get("delta", 0.0)],
        "omega": list(omega_grid) or [cfg.params.get("omega", 1.0)],
    }
    grid = [(b, d, w) for w in cfg.sweep["omega"] for b in cfg.sweep["beta"] for d in cfg.sweep["delta"]]
    tasks = [(f"beta={b},delta={d},omega={w}", lambda b=b, d=d, w=w: _sweep_row(cfg, b, d, w)) for b, d, w in grid]
    rows = run_parallel(tasks, cfg.threads)
    path = _write_table(pd.DataFrame(rows), _out_dir(cfg) / "sweep", cfg.fmt)
    click.echo(f"{len(rows)} grid points. Table: {path}")


def _sweep_row(cfg: RunConfig, beta: float, delta: float, omega: float) -> dict:
    from melcert.melnikov.certificate import certify_nonintegrability
    from melcert.melnikov.zeros import zero_existence_ratio
    from melcert.report import verdict_label
    from melcert.system.presets import build_preset, threshold_ratio

    sys_ = build_preset(cfg.preset, beta, delta, omega)
    _, series = _orbit_and_series(sys_, cfg, threads=1)
    cert = certify_nonintegrability(series, cfg.tolerances.get("tol_cert"))
    try:
        ratio = zero_existence_ratio(series)
    except MultiHarmonic:
        ratio = math.nan
    thresholds = threshold_ratio(cfg.preset, omega)
    # 0/0 when the forcing and the damping both vanish: M ≡ 0, no threshold
    beta_over_delta = beta / delta if delta else (math.inf if beta else math.nan)
    return {
        "preset": cfg.preset,
        "beta": beta,
        "delta": delta,
        "omega": omega,
        "M0": series.coeff(0).real,
        "abs_M1": abs(series.coeff(1)),
        "zero_existence_ratio": ratio,
        "simple_zeros": bool(ratio < 1.0),
        "beta_over_delta": beta_over_delta,
        "threshold": thresholds["derived"],
        "above_threshold": bool(beta_over_delta > thresholds["derived"]),
        "paper_printed_threshold": thresholds["printed"],
        "verdict": verdict_label(cert.verdict),
    }


# ---------------------------------------------------------------------------
# orbit-dump
# ---------------------------------------------------------------------------


@cli.command("orbit-dump")
@system_options
@click.option("--branch", type=click.Choice(["+", "-"]), default="+", help="Separatrix branch.")
@click.option("--method", type=click.Choice(["auto", "closed_form", "numeric"]), default="auto")
@click.option("--points", "n_points", type=int, default=2001, help="Number of samples.")
@reports_errors
def orbit_dump(branch, method, n_points, **opts):
    """Sample the separatrix: t, x, ẋ and the energy error."""
    from melcert.separatrix.orbit import export_grid
    from melcert.separatrix.shooting import find_orbit

    cfg = _run_config("orbit-dump", opts, branch=branch, method=method)
    sys_ = _load_system(cfg)
    orbit = find_orbit(sys_, 1 if branch == "+" else -1, method)
    df = export_grid(orbit, n_points)
    path = _write_table(df, _out_dir(cfg) / "orbit", cfg.fmt)
    click.echo(f"{orbit.orbit_id}: λ₋={orbit.source.lam:.6f}, λ₊={orbit.target.lam:.6f}, max H error {df['H_error'].max():.2e}")
    click.echo(f"Samples: {path}")


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _run_config(command: str, opts: dict, **extra) -> RunConfig:
    if (opts["input_path"] is None) == (opts["preset"] is None):
        raise SchemaError("give exactly one of --input and --preset")
    params = {k: opts[k] for k in ("beta", "delta", "omega") if opts[k] is not None}
    if opts["input_path"] is not None and params:
        raise SchemaError("--beta/--delta/--omega only apply to --preset")
    tolerances = {k: opts[k] for k in ("tol_coeff", "tol_cert", "tol_simple", "tol_commutator") if opts[k] is not None}
    return RunConfig(
        command=command,
        input_path=opts["input_path"],
        preset=opts["preset"],
        params=params,
        tolerances=tolerances,
        out_dir=opts["out_dir"] or settings.output_dir,
        fmt=opts["fmt"],
        threads=opts["threads"] if opts["threads"] is not None else settings.threads,
        extra=extra,
    )


def _load_system(cfg: RunConfig) -> PlanarSystem:
    from melcert.system.parser import load_system
    from melcert.system.presets import build_preset

    if cfg.input_path is not None:
        return load_system(cfg.input_path)
    return build_preset(cfg.preset, cfg.params.get("beta"), cfg.params.get("delta"), cfg.params.get("omega"))


def _orbit_and_series(sys_: PlanarSystem, cfg: RunConfig, orbit=None, with_series: bool = True, threads=None):
    from melcert.melnikov.coefficients import melnikov_series
    from melcert.separatrix.shooting import find_orbit

    orbit = find_orbit(sys_) if orbit is None else orbit
    if not with_series:
        return orbit, None
    threads = cfg.threads if threads is None else threads
    return orbit, melnikov_series(orbit, sys_, cfg.tolerances.get("tol_coeff"), threads)


def _monodromy(orbit, sys_: PlanarSystem, series, ell: int, cfg: RunConfig):
    from melcert.variational.monodromy import asymptotic_data, commutator_certificate, monodromy_pair

    data = asymptotic_data(orbit, sys_, ell, m_plus=series.coeff(ell))
    pair = monodromy_pair(data, sys_.omega)
    commutator_certificate(pair, cfg.tolerances.get("tol_commutator"))
    return pair


def _header(cfg: RunConfig, sys_: PlanarSystem) -> dict:
    return {
        "command": cfg.command,
        "system": sys_.name,
        "params": dict(sys_.params),
        "omega": sys_.omega,
        "tolerances": {
            "tol_coeff": cfg.tolerances.get("tol_coeff", settings.tol_coeff),
            "tol_cert": cfg.tolerances.get("tol_cert", settings.tol_cert),
            "tol_simple": cfg.tolerances.get("tol_simple", settings.tol_simple),
            "tol_commutator": cfg.tolerances.get("tol_commutator", settings.tol_commutator),
        },
    }


def _out_dir(cfg: RunConfig) -> Path:
    d = Path(cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_table(df: pd.DataFrame, stem: Path, fmt: str) -> Path:
    from melcert.report import write_csv, write_json

    if fmt == "csv":
        return write_csv(df, stem.with_suffix(".csv"))
    return write_json(df.to_dict(orient="list"), stem.with_suffix(".json"))


if __name__ == "__main__":
    cli()
