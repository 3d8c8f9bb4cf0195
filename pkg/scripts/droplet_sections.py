"""Droplet sections through the resonance region over H_2to3.

SN1 is the vertical section gamma1 = const in (gamma2, xi); SN2 is the
horizontal section xi = const in (gamma1, gamma2).  Both are drawn with the
fold-Hopf points where H_2to3 meets the boundary, and the pinch exponents at
the two ends of SN1 are fitted for each resonance.
"""

import argparse
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from doublehopf.bifurcation import droplet_section, fit_pinch_exponent, fold_hopf_points, hopf_curves
from doublehopf.model import example_coefficients
from doublehopf.svg import PALETTE, Figure


@dataclass
class SectionConfig:
    gamma1: float = -1.0
    xi: float = -0.75
    epsilon: float = 0.1
    n_vertical: int = 2001
    n_horizontal: int = 401
    ells: list = field(default_factory=lambda: [(1, 2), (1, 3), (1, 4), (2, 3)])
    out: str = "out/sections"


def sn1(cfg: SectionConfig, coeffs) -> str:
    res = droplet_section("gamma1", cfg.gamma1, coeffs, cfg.epsilon, n=cfg.n_vertical)
    b = res.boundary
    fig = Figure((b[:, 0].min() - 0.1, b[:, 0].max() + 0.1), (b[:, 1].min() - 0.1, b[:, 1].max() + 0.1),
                 xlabel="gamma2", ylabel="xi", title=f"SN1: gamma1 = {cfg.gamma1}, eps = {cfg.epsilon}")
    fig.polygon(b, fill=PALETTE["droplet"], opacity=0.3, stroke=PALETTE["droplet"])
    for p in fold_hopf_points(coeffs, cfg.epsilon, "gamma1", cfg.gamma1):
        fig.point(p.gamma[1], p.xi, PALETTE["fold_hopf"])
    return fig.render()


def sn2(cfg: SectionConfig, coeffs) -> str:
    res = droplet_section("xi", cfg.xi, coeffs, cfg.epsilon, n=cfg.n_horizontal)
    b = res.boundary
    lo, hi = b.min(axis=0) - 0.15, b.max(axis=0) + 0.15
    fig = Figure((lo[0], hi[0]), (lo[1], hi[1]), xlabel="gamma1", ylabel="gamma2",
                 title=f"SN2: xi = {cfg.xi}, eps = {cfg.epsilon}")
    fig.polygon(b, fill=PALETTE["droplet"], opacity=0.3, stroke=PALETTE["droplet"])
    h23 = next(c for c in hopf_curves(coeffs) if c.label == "H_2to3")
    fig.polyline(h23.segment(2 * float(np.abs(b).max())), PALETTE["H_2to3"], 1.5, label="H_2to3")
    for p in fold_hopf_points(coeffs, cfg.epsilon, "xi", cfg.xi):
        fig.point(*p.gamma, PALETTE["fold_hopf"])
    return fig.render()


def pinch_table(cfg: SectionConfig) -> list[dict]:
    rows = []
    for ell in cfg.ells:
        res = droplet_section("gamma1", cfg.gamma1, example_coefficients(ell=ell), cfg.epsilon, n=cfg.n_vertical)
        rows.append({
            "ell": list(ell),
            "sigma1_end": fit_pinch_exponent(res.samples, 0),
            "sigma1_expected": ell[1] / 2,
            "sigma2_end": fit_pinch_exponent(res.samples, 1),
            "sigma2_expected": ell[0] / 2,
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, default=SectionConfig.epsilon)
    ap.add_argument("--out", default=SectionConfig.out)
    args = ap.parse_args()
    cfg = SectionConfig(epsilon=args.epsilon, out=args.out)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    coeffs = example_coefficients()
    (out / "sn1.svg").write_text(sn1(cfg, coeffs))
    (out / "sn2.svg").write_text(sn2(cfg, coeffs))
    for p in fold_hopf_points(coeffs, cfg.epsilon, "xi", cfg.xi):
        print(f"fold-Hopf gamma = ({p.gamma[0]:.6f}, {p.gamma[1]:.6f}), residual {p.residual:.1e}")
    rows = pinch_table(cfg)
    for r in rows:
        print(f"l = {r['ell']}: sigma1 end {r['sigma1_end']:.4f} (expected {r['sigma1_expected']}), "
              f"sigma2 end {r['sigma2_end']:.4f} (expected {r['sigma2_expected']})")
    (out / "pinch.json").write_text(json.dumps({"config": asdict(cfg), "pinch": rows}, indent=2))


if __name__ == "__main__":
    main()
