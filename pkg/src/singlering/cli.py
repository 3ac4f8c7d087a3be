"""Command-line entry point: ``singlering <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import domains, outliers, rmt, subordination, weingarten
from .config import ExperimentConfig, GridSpec, bundled_config, parse_config
from .emit import emit_outputs, to_json
from .errors import SingleRingError, ValidationError
from .measures import DiscreteMeasure, symmetrize

DEFAULT_BBOX = (-3.0, 2.0, -2.0, 2.0)


def spec_hash(model: domains.ModelSpec) -> str:
    return hashlib.sha256(json.dumps(model.to_dict(), sort_keys=True).encode()).hexdigest()


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _measure(text: str) -> DiscreteMeasure:
    try:
        return DiscreteMeasure.from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad measure {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON experiment config (default: bundled figure1)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default: .)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base seed, overrides the config")

    parser = argparse.ArgumentParser(prog="singlering", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="eigenvalues of one sample")
    p.add_argument("--n", type=int)
    p.add_argument("--svg", action="store_true", help="also write spectrum.svg")

    p = sub.add_parser("domains", parents=[common], help="classify a grid into outer/inner domains")
    p.add_argument("--resolution", type=int)
    p.add_argument("--bbox", type=float, nargs=4, metavar=("XMIN", "XMAX", "YMIN", "YMAX"))

    p = sub.add_parser("outliers", parents=[common], help="Monte-Carlo outlier experiment")
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--svg", action="store_true", help="also write outliers.svg with pooled eigenvalues")

    p = sub.add_parser("subord", parents=[common], help="subordination functions along a horizontal line")
    p.add_argument("--mu1", type=_measure)
    p.add_argument("--mu2", type=_measure)
    p.add_argument("--interval", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--points", type=int)
    p.add_argument("--eta", type=float)

    p = sub.add_parser("weingarten", parents=[common], help="Weingarten table and Monte-Carlo comparison")
    p.add_argument("--p", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)

    p = sub.add_parser("gap", parents=[common], help="support-gap certificate around 0")
    p.add_argument("--mu1", type=_measure)
    p.add_argument("--mu2", type=_measure)
    p.add_argument("--z", type=_complex, help="use |a - z| and the singular values of the model")
    p.add_argument("--side", choices=["H1", "H2"])
    return parser


def _load(args) -> ExperimentConfig:
    cfg = parse_config(args.config) if getattr(args, "config", None) else bundled_config()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _outdir(args) -> Path:
    out = Path(getattr(args, "out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _need(value, what: str):
    if value is None:
        raise ValidationError(f"{what} is required (set it in the config or on the command line)")
    return value


def _pick(cli_value, cfg_value, what: str):
    return _need(cli_value if cli_value is not None else cfg_value, what)


def _grid(cfg: ExperimentConfig, args=None) -> GridSpec:
    bbox = getattr(args, "bbox", None) or (cfg.grid.bbox if cfg.grid else DEFAULT_BBOX)
    res = getattr(args, "resolution", None) or (cfg.grid.resolution if cfg.grid else 200)
    return GridSpec(tuple(bbox), res)


def cmd_spectrum(args, cfg: ExperimentConfig) -> dict:
    model = _need(cfg.model, "model")
    n = _pick(args.n, cfg.n, "n")
    seed = _need(cfg.seed, "seed")
    eigs = rmt.eigenvalues(rmt.sample_model(model, n, seed).m)
    out = _outdir(args)
    emit_outputs(eigs, "csv", out / "eigenvalues.csv")
    meta = {"seed": seed, "n": n, "spec_hash": spec_hash(model)}
    emit_outputs(meta, "json", out / "spectrum.json")
    if args.svg:
        g = _grid(cfg)
        grid = domains.grid_map(model, g.bbox, g.resolution)
        emit_outputs(grid, "svg", out / "spectrum.svg", eigs=eigs, spikes=model.spikes)
    return meta


def cmd_domains(args, cfg: ExperimentConfig) -> dict:
    model = _need(cfg.model, "model")
    g = _grid(cfg, args)
    grid = domains.grid_map(model, g.bbox, g.resolution)
    out = _outdir(args)
    emit_outputs(grid, "csv", out / "domains.csv")
    emit_outputs(grid, "svg", out / "domains.svg", spikes=model.spikes)
    counts = np.bincount(grid.classes.ravel(), minlength=3)
    return {
        "resolution": g.resolution,
        "bbox": list(g.bbox),
        "counts": {"none": int(counts[0]), "out": int(counts[1]), "in": int(counts[2])},
        "spikes": {f"{s.real:g}{s.imag:+g}i": domains.theta_classify(model, s).value for s in model.spikes},
    }


def cmd_outliers(args, cfg: ExperimentConfig) -> dict:
    model = _need(cfg.model, "model")
    n = _pick(args.n, cfg.n, "n")
    trials = _pick(args.trials, cfg.trials, "trials")
    tol = _pick(args.tol, cfg.tol, "tol")
    seed = _need(cfg.seed, "seed")
    report = outliers.run_experiment(model, n, trials, tol, seed, keep_eigenvalues=args.svg)
    out = _outdir(args)
    emit_outputs(report, "json", out / "outliers.json")
    if args.svg:
        g = _grid(cfg)
        grid = domains.grid_map(model, g.bbox, g.resolution)
        emit_outputs(grid, "svg", out / "outliers.svg", eigs=report.pooled_eigenvalues, spikes=model.spikes)
    return report.to_dict()


def cmd_subord(args, cfg: ExperimentConfig) -> dict:
    mu1 = _pick(args.mu1, cfg.mu1, "mu1")
    mu2 = _pick(args.mu2, cfg.mu2, "mu2")
    s = cfg.subord
    lo, hi = args.interval or (s.interval if s else (None, None))
    points = _pick(args.points, s.points if s else None, "points")
    eta = _pick(args.eta, s.eta if s else None, "eta")
    _need(lo, "interval")
    if not eta > 0 or points < 2 or not lo < hi:
        raise ValidationError("need eta > 0, points >= 2 and lo < hi")
    sols, init = [], None
    for x in np.linspace(lo, hi, points):
        sol = subordination.solve(mu1, mu2, complex(x, eta), init=init)
        init = sol.omega2
        sols.append(sol)
    emit_outputs(sols, "csv", _outdir(args) / "subord.csv")
    return {"points": points, "eta": eta, "max_residual": max(s.residual for s in sols)}


def cmd_weingarten(args, cfg: ExperimentConfig) -> dict:
    w = cfg.weingarten
    p = _pick(args.p, w.p if w else None, "p")
    n = _pick(args.n, w.n if w else None, "n")
    trials = args.trials or (w.trials if w and w.trials else 10_000)
    seed = _need(cfg.seed, "seed")
    table = weingarten.wg_exact(p, n)
    key = lambda part: ",".join(map(str, part))  # noqa: E731
    ns = [n, 2 * n, 4 * n]
    result = {
        "p": p,
        "n": n,
        "table": {key(t): v for t, v in table.values.items()},
        "residual": table.residual,
        "asymptotic": {
            key(t): {"mobius": weingarten.mobius(t), "n": ns, "ratio": weingarten.wg_asymptotic_check(p, t, ns)}
            for t in table.values
        },
        "monte_carlo": [],
    }
    for k, pat in enumerate(weingarten.STANDARD_BATTERY):
        if max(len(pat[0]), len(pat[1])) > p or max(max(x, default=0) for x in pat) >= n:
            continue
        exact = weingarten.mixed_moment_exact(*pat, n)
        mean, se = weingarten.mc_moment(*pat, n, trials, seed + k)
        result["monte_carlo"].append(
            {
                "pattern": [list(x) for x in pat],
                "exact": exact,
                "mean": [mean.real, mean.imag],
                "stderr": se,
                "within_3_sigma": bool(abs(mean - exact) <= 3 * se),
            }
        )
    if getattr(args, "out", None):
        emit_outputs(result, "json", _outdir(args) / "weingarten.json")
    return result


def cmd_gap(args, cfg: ExperimentConfig) -> dict:
    side = args.side or cfg.side or "H1"
    if args.z is not None:
        model = _need(cfg.model, "model")
        mu1 = symmetrize(model.aprime_law.abs_law(args.z))
        mu2 = symmetrize(model.sigma_law)
    else:
        mu1 = _pick(args.mu1, cfg.mu1, "mu1")
        mu2 = _pick(args.mu2, cfg.mu2, "mu2")
    cert = subordination.support_gap(mu1, mu2, side)
    result = {k: (v.value if isinstance(v, subordination.Side) else v) for k, v in vars(cert).items()}
    if getattr(args, "out", None):
        emit_outputs(result, "json", _outdir(args) / "gap.json")
    return result


COMMANDS = {
    "spectrum": cmd_spectrum,
    "domains": cmd_domains,
    "outliers": cmd_outliers,
    "subord": cmd_subord,
    "weingarten": cmd_weingarten,
    "gap": cmd_gap,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        result = COMMANDS[args.command](args, cfg)
    except SingleRingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(to_json(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
