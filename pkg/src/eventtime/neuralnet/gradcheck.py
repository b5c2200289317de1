"""Central finite differences over every model parameter.

All perturbed parameter sets for a chunk are stacked along a leading axis
and evaluated in one forward pass; the analytic backward pass is not used.
"""
from __future__ import annotations

import numpy as np

from ..sralgebra import SRVector
from .model import Model, forward_pass, sr_loss


def numeric_gradients(model: Model, link, gold: SRVector | None = None, eps: float = 1e-5,
                      chunk: int = 512) -> dict[str, np.ndarray]:
    gold = gold or link.gold
    enc = model.encode(link)
    names = list(model.params)
    sizes = [model.params[n].size for n in names]
    theta = np.concatenate([model.params[n].ravel() for n in names])
    N = theta.size

    def losses(thetas: np.ndarray) -> np.ndarray:
        B = thetas.shape[0]
        stacked, at = {}, 0
        for n, sz in zip(names, sizes):
            stacked[n] = thetas[:, at:at + sz].reshape((B,) + model.params[n].shape)
            at += sz
        probs, _ = forward_pass(stacked, enc, model.config)
        return sr_loss(probs, gold)

    grad = np.empty(N)
    for lo in range(0, N, chunk):
        hi = min(N, lo + chunk)
        idx = np.arange(lo, hi)
        plus = np.repeat(theta[None, :], hi - lo, axis=0)
        minus = plus.copy()
        plus[np.arange(hi - lo), idx] += eps
        minus[np.arange(hi - lo), idx] -= eps
        grad[lo:hi] = (losses(plus) - losses(minus)) / (2 * eps)

    out, at = {}, 0
    for n, sz in zip(names, sizes):
        out[n] = grad[at:at + sz].reshape(model.params[n].shape)
        at += sz
    return out


def max_relative_error(analytic: dict[str, np.ndarray], numeric: dict[str, np.ndarray],
                       floor: float = 1e-5) -> float:
    """max |a - n| / max(|a|, |n|, floor) over all entries.

    At eps=1e-5 the central difference carries ~1e-10 of rounding noise, so
    entries smaller than ``floor`` are in effect compared absolutely.
    """
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
