"""Adaptive tensor-product Gauss-Legendre quadrature on rectangles."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int


_NODES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order):
    if order not in _NODES:
        _NODES[order] = np.polynomial.legendre.leggauss(order)
    return _NODES[order]


def _rect(f, x0, x1, y0, y1, order):
    t, w = _gl(order)
    x = 0.5 * (x1 - x0) * t + 0.5 * (x1 + x0)
    y = 0.5 * (y1 - y0) * t + 0.5 * (y1 + y0)
    vals = f(x[:, None], y[None, :])
    return 0.25 * (x1 - x0) * (y1 - y0) * (w @ vals @ w)


def graded_breaks(length: float, scale: float, ridge: float = math.inf) -> np.ndarray:
    """Breakpoints on ``[0, length]``: geometric from ``scale/8`` near 0, then at most ``ridge`` apart."""
    pts = [0.0]
    x = min(scale / 8.0, length / 4.0)
    while x < length:
        pts.append(x)
        x = min(x * 2.0, x + ridge)
    pts.append(length)
    return np.unique(np.asarray(pts))


def adaptive_gl_2d(f, xbreaks, ybreaks, abs_tol: float, order: int = 10,
                   max_panels: int = 200_000) -> QuadResult:
    """Integrate a vectorised ``f(x, y)`` over the grid of rectangles given by the breakpoints.

    Each rectangle's error is estimated by comparing its rule against the sum
    over its four children; the worst rectangle is split until the summed
    estimate falls below ``abs_tol``.
    """
    heap = []
    total = 0.0
    err_total = 0.0

    def push(x0, x1, y0, y1, coarse):
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        kids = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
        vals = [_rect(f, *k, order) for k in kids]
        fine = sum(vals)
        err = abs(fine - coarse)
        heapq.heappush(heap, (-err, len(heap_ids), kids, vals, fine))
        heap_ids.append(None)
        return fine, err

    heap_ids: list = []
    xb = np.asarray(xbreaks, dtype=float)
    yb = np.asarray(ybreaks, dtype=float)
    for x0, x1 in zip(xb[:-1], xb[1:]):
        for y0, y1 in zip(yb[:-1], yb[1:]):
            fine, err = push(x0, x1, y0, y1, _rect(f, x0, x1, y0, y1, order))
            total += fine
            err_total += err
    panels = len(heap)
    while err_total > abs_tol:
        if panels > max_panels:
            raise QuadratureError(
                f"no convergence: error estimate {err_total:.3g} > {abs_tol:.3g} after {panels} panels")
        neg_err, _, kids, vals, fine = heapq.heappop(heap)
        total -= fine
        err_total += neg_err
        for k, v in zip(kids, vals):
            f2, e2 = push(*k, v)
            total += f2
            err_total += e2
        panels += 3
    total = math.fsum(item[4] for item in heap)
    return QuadResult(float(total), float(err_total), panels)
