"""The degenerate case eps = 0 and how the droplet opens for eps > 0.

At eps = 0 the resonance region over H_2to3 collapses to the line
xi = -<l_perp, sigma_bar>.  For eps > 0 its half-width grows like
eps^(|l|-2).  This script tabulates the width at gamma = (-1, 1) against
eps for several resonances and draws the gamma1 = -1 section for a few eps.
"""

import argparse
import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from doublehopf.bifurcation import droplet_sample, droplet_section
from doublehopf.model import example_coefficients
from doublehopf.svg import Figure


@dataclass
class DegenerateConfig:
    gamma: tuple[float, float] = (-1.0, 1.0)
    ells: list = field(default_factory=lambda: [(1, 2), (1, 3), (2, 3), (1, 4)])
    epsilons: list = field(default_factory=lambda: [0.0, 0.025, 0.05, 0.1, 0.2])
    out: str = "out/degenerate"


def width_table(cfg: DegenerateConfig) -> list[dict]:
    rows = []
    for ell in cfg.ells:
        c = example_coefficients(ell=ell)
        base = droplet_sample(cfg.gamma, c, 1.0).half_width
        for eps in cfg.epsilons:
            d = droplet_sample(cfg.gamma, c, eps)
            predicted = base * eps ** (sum(ell) - 2)
            rows.append({"ell": f"{ell[0]}:{ell[1]}", "epsilon": eps, "xi_center": d.xi_center,
                         "half_width": d.half_width, "predicted": predicted})
    return rows


def section_figure(cfg: DegenerateConfig) -> str:
    c = example_coefficients()
    fig = Figure((0.3, 2.05), (-2.4, 0.1), xlabel="gamma2", ylabel="xi", title="gamma1 = -1, l = 1:2")
    shades = ["#000000", "#b2df8a", "#66a61e", "#33a02c", "#1b5e20"]
    for eps, color in zip(cfg.epsilons, shades):
        res = droplet_section("gamma1", -1.0, c, eps, n=401)
        if eps == 0:
            fig.polyline([(d.gamma[1], d.xi_center) for d in res.samples], color, 1.0, dash="4,3", label="eps = 0")
        else:
            fig.polyline(res.boundary, color, 1.5, label=f"eps = {eps}")
    return fig.render()


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=DegenerateConfig.out)
    cfg = DegenerateConfig(out=ap.parse_args().out)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = width_table(cfg)
    with open(out / "widths.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    (out / "section_gamma1.svg").write_text(section_figure(cfg))
    for r in rows:
        rel = abs(r["half_width"] - r["predicted"]) / max(r["predicted"], 1e-300)
        print(f"{r['ell']}  eps={r['epsilon']:<6} width={r['half_width']:.6e}  rel.dev={rel:.1e}")


if __name__ == "__main__":
    main()
