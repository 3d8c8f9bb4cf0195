"""Minimal standalone SVG writer for bifurcation diagrams.

Coordinates are given in data units and mapped into a fixed pixel box;
all numbers are printed with fixed precision so output is byte-stable.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

PALETTE = {
    "H_a_0to1": "#d95f02",
    "H_b_0to1": "#e6ab02",
    "H_a_1to2": "#1b9e77",
    "H_b_1to2": "#7570b3",
    "H_2to3": "#e7298a",
    "droplet": "#66a61e",
    "fold_hopf": "#000000",
    "trajectory": "#1f78b4",
}


class Figure:
    def __init__(self, xlim, ylim, width=480, height=480, margin=48, xlabel="", ylabel="", title=""):
        self.xlim = (float(xlim[0]), float(xlim[1]))
        self.ylim = (float(ylim[0]), float(ylim[1]))
        if self.xlim[0] == self.xlim[1]:
            self.xlim = (self.xlim[0] - 1.0, self.xlim[1] + 1.0)
        if self.ylim[0] == self.ylim[1]:
            self.ylim = (self.ylim[0] - 1.0, self.ylim[1] + 1.0)
        self.width, self.height, self.margin = width, height, margin
        self.items: list[str] = []
        self.xlabel, self.ylabel, self.title = xlabel, ylabel, title

    def _px(self, x, y):
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        w = self.width - 2 * self.margin
        h = self.height - 2 * self.margin
        px = self.margin + (x - x0) / (x1 - x0) * w
        py = self.height - self.margin - (y - y0) / (y1 - y0) * h
        return px, py

    def polyline(self, pts, color="#000000", width=1.5, dash=None, label=None):
        pts = np.asarray(pts, dtype=float)
        if len(pts) < 2:
            return
        coords = " ".join("{:.3f},{:.3f}".format(*self._px(x, y)) for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        cls = f' class="{escape(label)}"' if label else ""
        self.items.append(
            f'<polyline{cls} points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"{extra}/>'
        )

    def polygon(self, pts, fill="#cccccc", opacity=0.5, stroke="none"):
        pts = np.asarray(pts, dtype=float)
        if len(pts) < 3:
            return
        coords = " ".join("{:.3f},{:.3f}".format(*self._px(x, y)) for x, y in pts)
        self.items.append(
            f'<polygon points="{coords}" fill="{fill}" fill-opacity="{opacity}" stroke="{stroke}"/>'
        )

    def point(self, x, y, color="#000000", r=3.0):
        px, py = self._px(x, y)
        self.items.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="{r}" fill="{color}"/>')

    def text(self, x, y, s, size=11, color="#000000", anchor="start"):
        px, py = self._px(x, y)
        self.items.append(
            f'<text x="{px:.3f}" y="{py:.3f}" font-size="{size}" fill="{color}" '
            f'text-anchor="{anchor}" font-family="sans-serif">{escape(s)}</text>'
        )

    def render(self) -> str:
        m, W, H = self.margin, self.width, self.height
        (x0, x1), (y0, y1) = self.xlim, self.ylim
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
            f'<rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}" fill="none" stroke="#444444"/>',
            f'<clipPath id="plot"><rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}"/></clipPath>',
        ]
        ticks = [
            f'<text x="{m}" y="{H - m + 16}" font-size="10" font-family="sans-serif">{x0:.4g}</text>',
            f'<text x="{W - m}" y="{H - m + 16}" font-size="10" text-anchor="end" font-family="sans-serif">{x1:.4g}</text>',
            f'<text x="{m - 4}" y="{H - m}" font-size="10" text-anchor="end" font-family="sans-serif">{y0:.4g}</text>',
            f'<text x="{m - 4}" y="{m + 10}" font-size="10" text-anchor="end" font-family="sans-serif">{y1:.4g}</text>',
            f'<text x="{W / 2:.1f}" y="{H - 12}" font-size="12" text-anchor="middle" font-family="sans-serif">{escape(self.xlabel)}</text>',
            f'<text x="14" y="{H / 2:.1f}" font-size="12" text-anchor="middle" font-family="sans-serif" '
            f'transform="rotate(-90 14 {H / 2:.1f})">{escape(self.ylabel)}</text>',
            f'<text x="{W / 2:.1f}" y="{m - 16}" font-size="13" text-anchor="middle" font-family="sans-serif">{escape(self.title)}</text>',
        ]
        body = ['<g clip-path="url(#plot)">', *self.items, "</g>"]
        return "\n".join(head + ticks + body + ["</svg>"]) + "\n"
