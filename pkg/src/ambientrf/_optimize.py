"""One-dimensional maximisation helpers."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo, hi, tol=1e-6, max_iter=200):
    """Golden-section search for a maximiser of ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)
