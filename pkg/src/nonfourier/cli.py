"""Config-driven command-line front end.

Subcommands: check | modal | simulate | sweep | audit. All outputs are plain
CSV (or flat key=value for verdicts) with a comment header recording the
tool version, the seed and the config path, so identical (config, seed)
pairs give byte-identical files.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Dict, List

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    build_gk_sim_config,
    build_material,
    build_model,
    build_sim_config,
    build_spectral,
    parse_config,
)
from .consistency import (
    ConsistencyVerdict,
    check_burgers,
    check_burgers_full,
    check_gk_nonlinear,
    check_gk_params,
    check_gn3,
    check_jeffreys,
    check_quintanilla,
)
from .energetics import dissipation_residual, dissipation_terms, entropy_production, free_energy, sample_state
from .modal import mode_reports
from .models import (
    MCV,
    GN2,
    GN3,
    Burgers,
    Fourier,
    GKLinear,
    GKNonlinear,
    Jeffreys,
    ModelParams,
    Quintanilla,
    gn2_consistent,
)
from .pde1d import DivergenceError, PositivityError, simulate, simulate_coupled_gk
from .tensors import is_psd, psd_margin


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _header(args) -> List[str]:
    return [
        f"# nonfourier {__version__}",
        f"# seed={args.seed}",
        f"# config={args.config}",
    ]


def _write(path: Path, lines: List[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def run_check(model: ModelParams) -> Dict[str, str]:
    """Dispatch the model to its consistency proposition."""
    if isinstance(m := model, Fourier):
        ok = is_psd(m.kappa)
        v = ConsistencyVerdict(
            ok, psd_margin(m.kappa),
            failed_condition="" if ok else "kappa not positive semidefinite",
            failure_mode="" if ok else "sign",
        )
    elif isinstance(m, GN2):
        ok = gn2_consistent(m.K)
        v = ConsistencyVerdict(
            ok, abs(m.K.det()),
            failed_condition="" if ok else "K singular", failure_mode="" if ok else "structural",
        )
    elif isinstance(m, MCV):
        from .tensors import is_pd

        ok = is_pd(m.kappa)
        v = ConsistencyVerdict(
            ok, psd_margin(m.kappa),
            failed_condition="" if ok else "kappa not positive definite",
            failure_mode="" if ok else "sign",
        )
    elif isinstance(m, Jeffreys):
        v = check_jeffreys(m.xi, m.kappa)
    elif isinstance(m, GN3):
        v = check_gn3(m.xi, m.kappa)
    elif isinstance(m, Quintanilla):
        v = check_quintanilla(m.tau, m.xi, m.kappa)
    elif isinstance(m, Burgers):
        v = check_burgers(m.lambda_b, m.tau, m.mu, m.nu)
    elif isinstance(m, GKNonlinear):
        v = check_gk_nonlinear(
            m.ell, m.varkappa, m.kappa, m.lambda2, m.mu, m.nu, m.delta
        )
    elif isinstance(m, GKLinear):
        v = check_gk_params(m)
    else:
        raise ConfigError(f"no consistency check for {type(m).__name__}")
    record = {
        "pass": _fmt(v.passed),
        "case": v.case_tag,
        "margin": _fmt(v.margin),
        "failed_condition": v.failed_condition,
        "failure_mode": v.failure_mode,
        "marginal": _fmt(v.marginal),
    }
    if isinstance(model, Burgers):
        full = check_burgers_full(model.lambda_b, model.tau, model.mu, model.nu)
        record["full.pass"] = _fmt(full.passed)
        record["full.margin"] = _fmt(full.margin)
        record["full.failed_condition"] = full.failed_condition
    return record


def cmd_check(args) -> int:
    cfg = parse_config(args.config)
    record = run_check(build_model(cfg))
    lines = _header(args) + [f"{k}={v}" for k, v in record.items()]
    _write(Path(args.out) / "verdict.txt", lines)
    for line in lines:
        print(line)
    return 0


def cmd_modal(args) -> int:
    cfg = parse_config(args.config)
    model = build_model(cfg)
    problem = build_spectral(cfg)
    reports = mode_reports(problem, model)
    lines = _header(args) + [
        "n,Lambda,Lambda_tilde,root1_re,root1_im,root2_re,root2_im,root3_re,root3_im,"
        "rh_pass,discriminant,class"
    ]
    for r in reports:
        roots = list(r.roots.roots) + [complex(np.nan, np.nan)] * (3 - len(r.roots.roots))
        cells = [str(r.n), _fmt(r.Lambda), _fmt(r.Lambda_tilde)]
        for w in roots[:3]:
            cells += [_fmt(w.real), _fmt(w.imag)]
        cells += [
            _fmt(r.rh_pass),
            _fmt(r.discriminant) if r.discriminant is not None else "",
            r.classification,
        ]
        lines.append(",".join(cells))
    _write(Path(args.out) / "modes.csv", lines)
    print(f"wrote {len(reports)} mode reports to {args.out}/modes.csv")
    return 0


def _warn_if_inconsistent(model: ModelParams) -> None:
    try:
        record = run_check(model)
    except ConfigError:
        return
    if record["pass"] == "false":
        print(
            "warning: consistency check fails "
            f"({record['failed_condition']}); simulating anyway",
            file=sys.stderr,
        )


def cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    model = build_model(cfg)
    _warn_if_inconsistent(model)
    out = Path(args.out)
    try:
        if isinstance(model, GKLinear):
            traj = simulate_coupled_gk(build_gk_sim_config(cfg))
            audit_cols = ("t", "min_zeta", "k_boundary", "k_inf", "max_residual")
            fields = traj.qs
            thetas = traj.thetas
        else:
            traj = simulate(build_sim_config(cfg))
            audit_cols = ("t", "min_sigma", "max_sigma", "max_residual", "theta_min", "max_amp")
            fields = traj.fluxes
            thetas = traj.thetas
    except (PositivityError, DivergenceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    snap = _header(args) + ["t,x,theta,q"]
    for t, th, q in zip(traj.times, thetas, fields):
        for xi, thi, qi in zip(traj.x, th, q):
            snap.append(f"{_fmt(t)},{_fmt(xi)},{_fmt(thi)},{_fmt(qi)}")
    _write(out / "snapshots.csv", snap)

    audit = _header(args) + [",".join(audit_cols)]
    nrows = traj.audit["t"].size
    for i in range(nrows):
        audit.append(",".join(_fmt(traj.audit[c][i]) for c in audit_cols))
    _write(out / "audit.csv", audit)
    print(f"wrote {len(traj.times)} snapshots and {nrows} audit rows to {args.out}")
    return 0


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    param = cfg.get("sweep.param")
    raw_values = cfg.get("sweep.values")
    if not param or not raw_values:
        raise ConfigError("sweep needs sweep.param and sweep.values")
    values = [v.strip() for v in raw_values.split(",")]
    lines = _header(args) + [
        f"{param},pass,case,margin,max_re_root,worst_class"
    ]
    for value in values:
        local = dict(cfg)
        local[param] = value
        model = build_model(local)
        record = run_check(model)
        problem = build_spectral(local)
        reports = mode_reports(problem, model)
        max_re = max(r.roots.max_real() for r in reports)
        rank = {"unstable": 4, "mixed": 3, "neutral_oscillation": 2, "oscillatory_decaying": 1, "decaying": 0}
        worst = max(reports, key=lambda r: rank[r.classification]).classification
        lines.append(
            ",".join(
                [value, record["pass"], record["case"], record["margin"], _fmt(max_re), worst]
            )
        )
    _write(Path(args.out) / "sweep.csv", lines)
    print(f"wrote {len(values)} sweep rows to {args.out}/sweep.csv")
    return 0


def cmd_audit(args) -> int:
    cfg = parse_config(args.config)
    model = build_model(cfg)
    samples = int(cfg.get("audit.samples", "1000"))
    rng = np.random.default_rng(args.seed)
    lines = _header(args) + ["sample,theta,psi,sigma,residual,rel_residual"]
    worst_rel = 0.0
    min_sigma = np.inf
    for i in range(samples):
        s = sample_state(model, rng)
        terms = dissipation_terms(model, s)
        res = float(np.sum(terms))
        scale = max(1e-300, float(np.abs(terms).max()))
        rel = abs(res) / scale
        psi = free_energy(model, s)
        sig = entropy_production(model, s)
        worst_rel = max(worst_rel, rel)
        min_sigma = min(min_sigma, sig)
        lines.append(
            f"{i},{_fmt(s.theta)},{_fmt(psi)},{_fmt(sig)},{_fmt(res)},{_fmt(rel)}"
        )
    _write(Path(args.out) / "residuals.csv", lines)
    print(
        f"audited {samples} random states: max relative residual {worst_rel:.3e}, "
        f"min sigma {min_sigma:.3e}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonfourier",
        description="Consistency checking, modal stability analysis and 1-D "
        "simulation of rate-type heat-conduction models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("check", cmd_check),
        ("modal", cmd_modal),
        ("simulate", cmd_simulate),
        ("sweep", cmd_sweep),
        ("audit", cmd_audit),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default="out")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
