"""Numpy building blocks with hand-written backward passes.

Forward functions accept parameters with extra leading dimensions (a stack
of parameter sets evaluated at once); backward functions expect a single
parameter set.
"""
from __future__ import annotations

import numpy as np


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def matvec(M: np.ndarray, v: np.ndarray) -> np.ndarray:
    return (M @ v[..., None])[..., 0]


# -- LSTM ---------------------------------------------------------------------
# gate layout in the 4H pre-activation: input, forget, output, candidate

def lstm_forward(X, W, U, b):
    """Run one LSTM direction over ``X`` (..., T, D). Returns hidden states and a cache."""
    T = X.shape[-2]
    H = U.shape[-1]
    XW = X @ np.swapaxes(W, -1, -2) + b[..., None, :]
    batch = np.broadcast_shapes(XW.shape[:-2], U.shape[:-2])
    h = np.zeros(batch + (H,))
    c = np.zeros(batch + (H,))
    hs, cs, gates = [], [], []
    for t in range(T):
        z = XW[..., t, :] + matvec(U, h)
        i = sigmoid(z[..., :H])
        f = sigmoid(z[..., H:2 * H])
        o = sigmoid(z[..., 2 * H:3 * H])
        g = np.tanh(z[..., 3 * H:])
        c = f * c + i * g
        h = o * np.tanh(c)
        hs.append(h)
        cs.append(c)
        gates.append((i, f, o, g))
    Hs = np.stack(hs, axis=-2)
    return Hs, (X, W, U, Hs, np.stack(cs, axis=-2), gates)


def lstm_backward(dHs, cache):
    """Gradients for a single (unstacked) LSTM direction."""
    X, W, U, Hs, Cs, gates = cache
    T, H = Hs.shape
    dZ = np.zeros((T, 4 * H))
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in range(T - 1, -1, -1):
        i, f, o, g = gates[t]
        c = Cs[t]
        c_prev = Cs[t - 1] if t > 0 else np.zeros(H)
        tc = np.tanh(c)
        dh = dHs[t] + dh_next
        do = dh * tc
        dc = dh * o * (1.0 - tc * tc) + dc_next
        di = dc * g
        dg = dc * i
        df = dc * c_prev
        dc_next = dc * f
        dz = dZ[t]
        dz[:H] = di * i * (1.0 - i)
        dz[H:2 * H] = df * f * (1.0 - f)
        dz[2 * H:3 * H] = do * o * (1.0 - o)
        dz[3 * H:] = dg * (1.0 - g * g)
        dh_next = U.T @ dz
    H_prev = np.vstack([np.zeros((1, H)), Hs[:-1]])
    return dZ @ W, dZ.T @ X, dZ.T @ H_prev, dZ.sum(axis=0)


def bilstm_forward(X, p, prefix="lstm"):
    Hf, cf = lstm_forward(X, p[f"{prefix}_f_W"], p[f"{prefix}_f_U"], p[f"{prefix}_f_b"])
    Hb_rev, cb = lstm_forward(X[..., ::-1, :], p[f"{prefix}_b_W"], p[f"{prefix}_b_U"], p[f"{prefix}_b_b"])
    Hb = Hb_rev[..., ::-1, :]
    return np.concatenate([Hf, Hb], axis=-1), (cf, cb)


def bilstm_backward(dHs, cache, grads, prefix="lstm"):
    cf, cb = cache
    H = dHs.shape[-1] // 2
    dXf, dWf, dUf, dbf = lstm_backward(dHs[:, :H], cf)
    dXb_rev, dWb, dUb, dbb = lstm_backward(dHs[::-1, H:], cb)
    grads[f"{prefix}_f_W"] += dWf
    grads[f"{prefix}_f_U"] += dUf
    grads[f"{prefix}_f_b"] += dbf
    grads[f"{prefix}_b_W"] += dWb
    grads[f"{prefix}_b_U"] += dUb
    grads[f"{prefix}_b_b"] += dbb
    return dXf + dXb_rev[::-1]


# -- mention-wise attention ---------------------------------------------------------

def attend(h_m, Hs, Wa):
    """Bilinear attention of mention state ``h_m`` over states ``Hs``.

    score(s) = h_m^T Wa Hs[s]; weights are the softmax of the scores and the
    context is the weighted average of ``Hs``. Returns (weights, context).
    """
    u = matvec(np.swapaxes(Wa, -1, -2), h_m)
    scores = matvec(Hs, u)
    a = softmax(scores, axis=-1)
    c = (a[..., None, :] @ Hs)[..., 0, :]
    return a, c


def attend_backward(dc, h_m, Hs, Wa, a):
    """Returns (d h_m, d Hs, d Wa) for a single example."""
    u = Wa.T @ h_m
    da = Hs @ dc
    dscores = a * (da - a @ da)
    dHs = np.outer(a, dc) + np.outer(dscores, u)
    du = Hs.T @ dscores
    return Wa @ du, dHs, np.outer(h_m, du)
