"""Parameter-plane figure: the five Hopf lines and the region signatures.

Writes hopf.svg, hopf_regions.json and prints one row per region.
"""

import argparse
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from doublehopf.bifurcation import hopf_curves
from doublehopf.cli import region_scan
from doublehopf.model import example_coefficients
from doublehopf.svg import PALETTE, Figure


@dataclass
class HopfFigureConfig:
    ell: tuple[int, int] = (1, 2)
    half_window: float = 2.0
    grid: int = 200
    out: str = "out/hopf"


def run(cfg: HopfFigureConfig) -> dict:
    coeffs = example_coefficients(ell=cfg.ell)
    h = cfg.half_window
    window = (-h, h, -h, h)
    curves = hopf_curves(coeffs)
    scan = region_scan(coeffs, window, (cfg.grid, cfg.grid))

    fig = Figure((-h, h), (-h, h), xlabel="gamma1", ylabel="gamma2", title=f"Hopf lines, l = {cfg.ell}")
    for c in curves:
        fig.polyline(c.segment(2 * h), PALETTE[c.label], 2.0, label=c.label)
    for i, r in enumerate(scan["regions"]):
        fig.text(*r["centroid"], f"R{i + 1}", size=10, color="#555555", anchor="middle")

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "hopf.svg").write_text(fig.render())
    summary = {
        "config": asdict(cfg),
        "slopes": {c.label: (None if not np.isfinite(c.slope()) else c.slope() + 0.0) for c in curves},
        **scan,
    }
    (out / "hopf_regions.json").write_text(json.dumps(summary, indent=2))
    return summary


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=HopfFigureConfig.grid)
    ap.add_argument("--out", default=HopfFigureConfig.out)
    args = ap.parse_args()
    summary = run(HopfFigureConfig(grid=args.grid, out=args.out))
    for label, s in summary["slopes"].items():
        print(f"{label:10s} slope {s}")
    print(f"{summary['n_regions']} regions ({summary['skipped']} grid points on lines)")
    for i, r in enumerate(summary["regions"]):
        sig = ", ".join(f"{k}: {v}" for k, v in r["signature"])
        print(f"R{i + 1} ({r['centroid'][0]:+.2f}, {r['centroid'][1]:+.2f})  {sig}")


if __name__ == "__main__":
    main()
