"""Command-line front end.

Every subcommand builds a dict ``{filename: text}``.  With ``--out DIR``
the files are written there; otherwise the primary artifact goes to
stdout.  Exit codes: 0 success, 2 configuration error, 3 mathematical
degeneracy, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import warnings
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import bifurcation as bif
from . import diophantine, dynamics, equilibria
from .errors import ConfigError, DegeneracyError, DomainError, IntegrationError
from .invariants import make_resonance
from .model import ReducedState, ScaledParameters, coefficients_from_dict
from .svg import PALETTE, Figure

TOOL = "doublehopf"

try:
    VERSION = version("doublehopf")
except PackageNotFoundError:  # pragma: no cover
    VERSION = "0.1.0"

SEED_TOL = 1e-8

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# helpers


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _csv(rows, header="label,gamma1,gamma2,xi,half_width,sigma1,sigma2") -> str:
    return header + "\n" + "".join(",".join(_fmt(v) for v in r) + "\n" for r in rows)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _pair(text: str, name: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"--{name} expects two comma-separated numbers, got {text!r}") from exc
    return a, b


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise ConfigError(f"--grid expects n1xn2, got {text!r}") from exc
    if a < 1 or b < 1:
        raise ConfigError("grid must be nonempty")
    return a, b


def _section(text: str) -> tuple[str, float]:
    key, _, val = text.partition("=")
    if key not in ("gamma1", "xi") or not val:
        raise ConfigError(f"--section expects gamma1=<v> or xi=<v>, got {text!r}")
    try:
        return key, float(val)
    except ValueError as exc:
        raise ConfigError(f"bad section value {val!r}") from exc


def _read_json(path) -> tuple[dict, bytes]:
    if path is None:
        raise ConfigError("--config is required")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    raw = p.read_bytes()
    try:
        return json.loads(raw), raw
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc


def _config_hash(raw: bytes, args: argparse.Namespace) -> str:
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "config")}
    h = hashlib.sha256()
    h.update(raw)
    h.update(json.dumps(opts, sort_keys=True, default=str).encode())
    return h.hexdigest()


def _report(args, raw: bytes, body: dict) -> dict:
    return {"tool": TOOL, "version": VERSION, "command": args.command, "config_hash": _config_hash(raw, args), **body}


def _load_coeffs(args):
    doc, raw = _read_json(args.config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        coeffs = coefficients_from_dict(doc)
    return coeffs, raw


def _epsilon(args) -> float:
    eps = 0.0 if args.epsilon is None else float(args.epsilon)
    if eps < 0:
        raise ConfigError("epsilon must be nonnegative")
    return eps


def _wants(args, fmt: str) -> bool:
    return args.format is None or args.format == fmt


# ---------------------------------------------------------------------------
# subcommands


def cmd_equilibria(args) -> dict[str, str]:
    coeffs, raw = _load_coeffs(args)
    g1, g2 = _pair(args.gamma, "gamma")
    params = ScaledParameters(g1, g2, args.xi, _epsilon(args))
    records = equilibria.basis_equilibria(params, coeffs)
    degenerate = equilibria.on_bifurcation_set(params, coeffs)
    out = []
    for r in records:
        d = r.to_dict()
        d["fiber_frequency"] = equilibria.fiber_frequency(r.sigma_bar, params, coeffs) if r.admissible else None
        out.append(d)
    signature = None if degenerate else [list(e) for e in equilibria.classify_region(params, coeffs).entries]
    body = {
        "gamma": [g1, g2],
        "xi": params.xi,
        "epsilon": params.epsilon,
        "degenerate": degenerate,
        "genericity": coeffs.genericity(),
        "equilibria": out,
        "signature": signature,
    }
    return {"equilibria.json": _dumps(_report(args, raw, body))}


def _exact_slopes(coeffs) -> dict[str, str]:
    (p11, p12), (p21, p22) = (tuple(Fraction(float(x)) for x in row) for row in coeffs.P)
    normals = {
        "H_a_0to1": (Fraction(1), Fraction(0)),
        "H_b_0to1": (Fraction(0), Fraction(1)),
        "H_a_1to2": (p21, -p11),
        "H_b_1to2": (p22, -p12),
        "H_2to3": (p22 * (p21 - p11), p11 * (p12 - p22)),
    }
    return {k: ("inf" if c2 == 0 else str(-c1 / c2)) for k, (c1, c2) in normals.items()}


def region_scan(coeffs, window, grid) -> dict:
    """Sample ``classify_region`` on a grid; returns distinct signatures and counts."""
    x0, x1, y0, y1 = window
    n1, n2 = grid
    # half-cell offset keeps the lines through the origin off the grid
    xs = x0 + (np.arange(n1) + 0.5) * (x1 - x0) / n1
    ys = y0 + (np.arange(n2) + 0.5) * (y1 - y0) / n2
    curves = bif.hopf_curves(coeffs)
    found: dict[tuple, list] = {}
    skipped = 0
    for gx in xs:
        for gy in ys:
            try:
                sig = equilibria.classify_region(ScaledParameters(float(gx), float(gy)), coeffs, curves=curves)
            except DegeneracyError:
                skipped += 1
                continue
            found.setdefault(sig.entries, []).append((float(gx), float(gy)))
    regions = []
    for entries, pts in found.items():
        pts = np.array(pts)
        regions.append(
            {
                "signature": [list(e) for e in entries],
                "count": int(len(pts)),
                "centroid": [float(v) for v in pts.mean(axis=0)],
            }
        )
    regions.sort(key=lambda r: np.arctan2(r["centroid"][1], r["centroid"][0]))
    return {"regions": regions, "n_regions": len(regions), "skipped": skipped}


def cmd_curves(args) -> dict[str, str]:
    coeffs, raw = _load_coeffs(args)
    window = tuple(float(x) for x in args.window.split(",")) if args.window else (-2.0, 2.0, -2.0, 2.0)
    if len(window) != 4 or window[0] >= window[1] or window[2] >= window[3]:
        raise ConfigError("--window expects g1min,g1max,g2min,g2max")
    grid = _grid(args.grid) if args.grid else (100, 100)
    curves = bif.hopf_curves(coeffs)
    half = max(abs(v) for v in window)
    rows = []
    for c in curves:
        for p in c.segment(half):
            rows.append((c.label, p[0], p[1], None, None, None, None))
    scan = region_scan(coeffs, window, grid)
    body = {
        "window": list(window),
        "grid": list(grid),
        "curves": [
            {
                "label": c.label,
                "normal": list(c.normal),
                "activity": c.activity,
                "direction": None if c.direction is None else list(c.direction),
                "slope": None if not np.isfinite(c.slope()) else c.slope(),
            }
            for c in curves
        ],
        "exact_slopes": _exact_slopes(coeffs),
        **scan,
    }
    files = {}
    if _wants(args, "csv"):
        files["curves.csv"] = _csv(rows)
    if _wants(args, "json"):
        files["curves.json"] = _dumps(_report(args, raw, body))
    if _wants(args, "svg"):
        fig = Figure(window[:2], window[2:], xlabel="gamma1", ylabel="gamma2", title="Hopf lines")
        for c in curves:
            seg = c.segment(2 * half)
            fig.polyline(seg, PALETTE[c.label], 2.0, label=c.label)
            if len(seg):
                tip = seg[-1] * 0.45 * half / max(np.abs(seg[-1]).max(), 1e-300)
                fig.text(tip[0], tip[1], c.label, color=PALETTE[c.label])
        for i, r in enumerate(scan["regions"]):
            fig.text(*r["centroid"], f"R{i + 1}", size=10, color="#555555", anchor="middle")
        files["curves.svg"] = fig.render()
    return files


def cmd_droplet(args) -> dict[str, str]:
    coeffs, raw = _load_coeffs(args)
    if not args.section:
        raise ConfigError("--section is required")
    kind, value = _section(args.section)
    eps = _epsilon(args)
    # the vertical grid must be dense enough to resolve the pinch-fit window
    n = _grid(args.grid)[0] if args.grid else (2001 if kind == "gamma1" else 401)
    res = bif.droplet_section(kind, value, coeffs, eps, n=n, convention=args.convention)
    fh = bif.fold_hopf_points(coeffs, eps, kind, value, convention=args.convention)
    rows = []
    for label, branch, sign in (("droplet_upper", res.upper, 1), ("droplet_lower", res.lower, -1)):
        for d in branch:
            xi = d.xi_center + sign * d.half_width if kind == "gamma1" else value
            rows.append((label, d.gamma[0], d.gamma[1], xi, d.half_width, d.sigma_bar[0], d.sigma_bar[1]))
    for p in fh:
        s = p.sample
        rows.append(("fold_hopf", p.gamma[0], p.gamma[1], p.xi, s.half_width, s.sigma_bar[0], s.sigma_bar[1]))
    h23 = _h23_outside(res, fh, coeffs, kind, value)
    for seg in h23:
        for pt in seg:
            if kind == "gamma1":
                rows.append(("H_2to3", value, pt[0], pt[1], None, None, None))
            else:
                rows.append(("H_2to3", pt[0], pt[1], value, None, None, None))
    exps = {}
    if kind == "gamma1" and res.samples and eps > 0:
        for end, name in ((0, "sigma1"), (1, "sigma2")):
            try:
                exps[name] = bif.fit_pinch_exponent(res.samples, end)
            except DomainError:
                exps[name] = None
    body = {
        "section": {kind: value},
        "epsilon": eps,
        "convention": args.convention,
        "n_samples": len(res.samples),
        "max_half_width": max((d.half_width for d in res.samples), default=0.0),
        "fold_hopf": [{"gamma": list(p.gamma), "xi": p.xi, "residual": p.residual} for p in fh],
        "pinch_exponents": exps,
        "expected_exponents": {"sigma1": coeffs.ell.ell2 / 2, "sigma2": coeffs.ell.ell1 / 2},
    }
    files = {}
    if _wants(args, "csv"):
        files["droplet.csv"] = _csv(rows)
    if _wants(args, "json"):
        files["droplet.json"] = _dumps(_report(args, raw, body))
    if _wants(args, "svg"):
        files["droplet.svg"] = _droplet_svg(res, fh, h23, kind, value, eps)
    return files


def _h23_outside(res, fh, coeffs, kind, value) -> list[np.ndarray]:
    """Parts of H_2to3 in the section plane that lie outside the droplet."""
    h23 = next(c for c in bif.hopf_curves(coeffs) if c.label == "H_2to3")
    if h23.activity == "none":
        return []
    if kind == "gamma1":
        if not res.samples or not h23.is_active((value, -h23.normal[0] * value / h23.normal[1])):
            return []
        g2 = -h23.normal[0] * value / h23.normal[1]
        xi_all = res.boundary[:, 1]
        pad = max(xi_all.max() - xi_all.min(), 1e-3)
        lo, hi = xi_all.min() - pad, xi_all.max() + pad
        if len(fh) == 2:
            a, b = sorted(p.xi for p in fh)
            return [np.array([[g2, lo], [g2, a]]), np.array([[g2, b], [g2, hi]])]
        return [np.array([[g2, lo], [g2, hi]])]
    d = np.asarray(h23.direction)
    t_far = 1.2 * max((np.hypot(*s.gamma) for s in res.samples), default=1.0)
    if len(fh) == 2:
        ta, tb = sorted(float(np.hypot(*p.gamma)) for p in fh)
        return [np.array([0 * d, ta * d]), np.array([tb * d, max(t_far, 1.2 * tb) * d])]
    return [np.array([0 * d, t_far * d])]


def _droplet_svg(res, fh, h23, kind, value, eps) -> str:
    pts = [res.boundary] + list(h23)
    allpts = np.vstack([p for p in pts if len(p)]) if any(len(p) for p in pts) else np.zeros((1, 2))
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = 0.05 * np.maximum(hi - lo, 1e-6)
    if kind == "gamma1":
        labels = ("gamma2", "xi", f"gamma1 = {value:g}, eps = {eps:g}")
    else:
        labels = ("gamma1", "gamma2", f"xi = {value:g}, eps = {eps:g}")
    fig = Figure((lo[0] - pad[0], hi[0] + pad[0]), (lo[1] - pad[1], hi[1] + pad[1]),
                 xlabel=labels[0], ylabel=labels[1], title=labels[2])
    if len(res.boundary):
        fig.polygon(res.boundary, fill=PALETTE["droplet"], opacity=0.35)
        fig.polyline(res.boundary, PALETTE["droplet"], 1.5, label="droplet")
    for seg in h23:
        fig.polyline(seg, PALETTE["H_2to3"], 2.0, label="H_2to3")
    for p in fh:
        x, y = (p.gamma[1], p.xi) if kind == "gamma1" else p.gamma
        fig.point(x, y, PALETTE["fold_hopf"], 3.5)
    return fig.render()


def _seeds(args, ell) -> list[ReducedState]:
    seeds = []
    if args.seed_file:
        doc, _ = _read_json(args.seed_file)
        if not isinstance(doc, list) or not doc:
            raise ConfigError("seed file must hold a nonempty JSON list")
        for item in doc:
            if isinstance(item, dict) and "sigma" in item:
                s1, s2 = item["sigma"]
                seeds.append(ReducedState.on_variety(float(s1), float(s2), float(item.get("theta", 0.0)), ell))
            elif isinstance(item, list) and len(item) == 4:
                seeds.append(ReducedState(*(float(v) for v in item)))
            else:
                raise ConfigError(f"bad seed entry {item!r}")
    if args.seed:
        vals = [float(v) for v in args.seed.split(",")]
        if len(vals) != 3:
            raise ConfigError("--seed expects sigma1,sigma2,theta")
        seeds.append(ReducedState.on_variety(vals[0], vals[1], vals[2], ell))
    if not seeds:
        raise ConfigError("no seeds: give --seed-file or --seed")
    for s in seeds:
        drift = dynamics.relative_drift(s.as_array()[None, :], ell)[0]
        if drift > SEED_TOL:
            raise ConfigError(f"seed {s.as_array().tolist()} is off the reduced phase space (residual {drift:.3g})")
    return seeds


def cmd_simulate(args) -> dict[str, str]:
    coeffs, raw = _load_coeffs(args)
    if args.phases and coeffs.driving is None:
        raise ConfigError("phase track requested but the coefficient file has no driving record")
    g1, g2 = _pair(args.gamma, "gamma")
    params = ScaledParameters(g1, g2, args.xi, _epsilon(args))
    seeds = _seeds(args, coeffs.ell)
    files: dict[str, str] = {}
    summary = []
    for i, seed in enumerate(seeds):
        traj = dynamics.integrate(seed, params, coeffs, args.t_end, args.tol_rel, args.tol_abs)
        files[f"trajectory_{i}.csv"] = traj.to_csv()
        if args.phases:
            files[f"phases_{i}.csv"] = dynamics.reconstruct_torus_phases(traj, coeffs).to_csv()
        diag = dynamics.detect_relative_orbit(traj, params, coeffs)
        summary.append(
            {
                "seed": [float(v) for v in seed.as_array()],
                "final": [float(v) for v in traj.states[-1]],
                "max_syzygy_drift": traj.max_syzygy_drift,
                "accepted": traj.accepted,
                "rejected": traj.rejected,
                "orbit": {"kind": diag.kind, "period": diag.period, "indeterminate": diag.indeterminate},
            }
        )
    body = {"gamma": [g1, g2], "xi": params.xi, "epsilon": params.epsilon, "t_end": args.t_end, "runs": summary}
    files["simulate.json"] = _dumps(_report(args, raw, body))
    if args.format == "csv":
        files = {k: v for k, v in files.items() if k.endswith(".csv")}
    elif args.format == "json":
        files = {k: v for k, v in files.items() if k.endswith(".json")}
    return files


def cmd_diophantine(args) -> dict[str, str]:
    doc, raw = _read_json(args.config)
    try:
        inp = diophantine.DiophantineInput(
            omega=tuple(float(x) for x in doc.get("omega", [])),
            alpha=tuple(float(x) for x in doc["alpha"]),
            gamma_gap=float(doc["gamma_gap"]),
            kappa=float(doc["kappa"]),
            N=int(doc["N"]),
            ell=make_resonance(*doc["ell"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid diophantine config: {exc}") from exc
    viol = diophantine.check(inp)
    body = {
        "input": {
            "omega": list(inp.omega),
            "alpha": list(inp.alpha),
            "gamma_gap": inp.gamma_gap,
            "kappa": inp.kappa,
            "N": inp.N,
            "ell": [inp.ell.ell1, inp.ell.ell2],
        },
        "passes": not viol,
        "n_violations": len(viol),
        "violations": [v.to_dict() for v in viol],
    }
    if inp.N >= 1:
        k, l, ratio = diophantine.worst_margin(inp)
        body["worst_margin"] = {"k": list(k), "l": list(l), "ratio": ratio}
    return {"diophantine.json": _dumps(_report(args, raw, body))}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="coefficient (or diophantine) JSON file")
    common.add_argument("--out", help="output directory; stdout when omitted")
    common.add_argument("--format", choices=("csv", "json", "svg"), help="restrict outputs to one format")
    common.add_argument("--epsilon", type=float, help="blow-up scale (default 0)")
    common.add_argument("--grid", help="grid size n1xn2")
    common.add_argument("--section", help="gamma1=<v> or xi=<v>")
    common.add_argument("--tol-rel", type=float, default=1e-10)
    common.add_argument("--tol-abs", type=float, default=1e-10)
    common.add_argument("--seed-file", help="JSON list of initial states")

    parser = argparse.ArgumentParser(prog=TOOL, description="Resonant double Hopf bifurcation analysis.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibria", parents=[common], help="basis equilibria and stability at (gamma, xi)")
    p.add_argument("--gamma", required=True, help="gamma1,gamma2")
    p.add_argument("--xi", type=float, default=0.0)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("curves", parents=[common], help="Hopf lines and region scan")
    p.add_argument("--window", help="g1min,g1max,g2min,g2max (default -2,2,-2,2)")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("droplet", parents=[common], help="resonance droplet sections")
    p.add_argument("--convention", choices=bif.TANGENCY_CONVENTIONS, default="derived")
    p.set_defaults(func=cmd_droplet)

    p = sub.add_parser("simulate", parents=[common], help="integrate the reduced field")
    p.add_argument("--gamma", required=True, help="gamma1,gamma2")
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--seed", help="sigma1,sigma2,theta for a single on-variety seed")
    p.add_argument("--phases", action="store_true", help="also reconstruct torus phases")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diophantine", parents=[common], help="finite-order Diophantine check")
    p.set_defaults(func=cmd_diophantine)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        files = args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegeneracyError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except IntegrationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text)
    else:
        primary = next(iter(files.values()), "")
        sys.stdout.write(primary)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
