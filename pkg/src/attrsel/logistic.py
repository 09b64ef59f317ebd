"""Multinomial logistic regression fitted by batch gradient descent.

Weights use the layout ``classes x (features + 1)`` with the bias in the last
column. The batched trainer fits many column-masked problems on one design
matrix at once; every problem runs its own backtracking line search and
stopping test, and its result does not depend on the rest of the batch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ARMIJO = 1e-4
MIN_STEP = 1e-12
GROW = 2.0


def add_bias(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.hstack([X, np.ones((X.shape[0], 1))])


def one_hot(y, n_classes: int) -> np.ndarray:
    return np.eye(n_classes)[np.asarray(y, dtype=np.int64)]


def softmax(Z: np.ndarray) -> np.ndarray:
    Z = Z - Z.max(axis=-1, keepdims=True)
    np.exp(Z, out=Z)
    Z /= Z.sum(axis=-1, keepdims=True)
    return Z


def lr_loss_and_gradient(W: np.ndarray, X: np.ndarray, y, ridge: float) -> tuple[float, np.ndarray]:
    """Mean cross-entropy plus ``ridge/2 * ||W without bias||^2`` and its exact gradient.

    ``X`` holds the raw features (no bias column); ``y`` is a label vector or a
    one-hot matrix.
    """
    W = np.asarray(W, dtype=np.float64)
    Xb = add_bias(X)
    K = W.shape[0]
    if W.shape[1] != Xb.shape[1]:
        raise ValueError(f"W has {W.shape[1]} columns, expected {Xb.shape[1]}")
    y = np.asarray(y)
    Y = one_hot(y, K) if y.ndim == 1 else y.astype(np.float64)
    if Y.shape != (Xb.shape[0], K):
        raise ValueError("label shape does not match X and W")
    Z = Xb @ W.T
    m = Z.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(Z - m).sum(axis=1))
    n = Xb.shape[0]
    loss = float((lse - (Z * Y).sum(axis=1)).mean())
    Wn = W[:, :-1]
    loss += 0.5 * ridge * float((Wn ** 2).sum())
    P = np.exp(Z - lse[:, None])
    grad = (P - Y).T @ Xb / n
    grad[:, :-1] += ridge * Wn
    return loss, grad


def _batch_state(XbT, y_idx, W, ridge, penal):
    """Per-problem loss and probabilities (B, K, n) for weights ``W`` of shape (B, K, q)."""
    Z = np.matmul(W, XbT)
    m = Z.max(axis=1)
    Z -= m[:, None, :]
    true_logit = np.take_along_axis(Z, y_idx, axis=1)[:, 0, :]
    np.exp(Z, out=Z)
    s = Z.sum(axis=1)
    loss = (np.log(s) - true_logit).mean(axis=1)
    loss += 0.5 * ridge * ((W * penal) ** 2).sum(axis=(1, 2))
    Z /= s[:, None, :]
    return loss, Z


@dataclass
class BatchFit:
    weights: np.ndarray     # (B, K, q)
    loss: np.ndarray        # (B,)
    grad_norm: np.ndarray   # (B,)
    iterations: np.ndarray  # (B,)
    loss_history: list | None = None


def fit_softmax_batch(X: np.ndarray, y, n_classes: int, masks=None, ridge: float = 1e-8,
                      max_iter: int = 200, tol: float = 1e-8, step: float = 4.0,
                      record_loss: bool = False) -> BatchFit:
    """Fit one logistic model per row of ``masks`` (feature subsets of ``X``).

    Gradient descent from zero weights with an Armijo backtracking line search,
    so every problem's loss is nonincreasing. The first trial step is the last
    accepted one, doubled if that was accepted without backtracking. A problem
    stops once its gradient norm drops below ``tol`` or after ``max_iter``
    iterations.
    """
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    if masks is None:
        masks = np.ones((1, p), dtype=bool)
    masks = np.atleast_2d(np.asarray(masks, dtype=bool))
    if masks.shape[1] != p:
        raise ValueError(f"masks have {masks.shape[1]} columns, expected {p}")
    B = masks.shape[0]
    K = n_classes
    Xb = add_bias(X)
    XbT = np.ascontiguousarray(Xb.T)
    Yt = np.ascontiguousarray(one_hot(y, K).T)
    y_idx = np.asarray(y, dtype=np.int64)[None, None, :]
    keep = np.hstack([masks, np.ones((B, 1), dtype=bool)]).astype(np.float64)[:, None, :]
    penal = np.r_[np.ones(p), 0.0]

    W = np.zeros((B, K, p + 1))
    loss, P = _batch_state(XbT, y_idx, W, ridge, penal)
    eta = np.full(B, float(step))
    grow = np.ones(B, dtype=bool)
    iters = np.zeros(B, dtype=np.int64)
    gnorm = np.full(B, np.inf)
    stalled = np.zeros(B, dtype=bool)
    active = np.arange(B)
    history = [loss.copy()] if record_loss else None

    def gradient(idx):
        G = np.matmul(P[idx] - Yt, Xb)
        G /= n
        G += ridge * W[idx] * penal
        G *= keep[idx]
        return G

    G = gradient(active)
    gnorm[active] = np.sqrt((G ** 2).sum(axis=(1, 2)))
    for _ in range(max_iter):
        live = (gnorm[active] >= tol) & ~stalled[active]
        active, G = active[live], G[live]
        if active.size == 0:
            break
        g2 = (G ** 2).sum(axis=(1, 2))
        trial_eta = np.where(grow[active], np.minimum(GROW * eta[active], 1e6), eta[active])
        first_try = np.ones(active.size, dtype=bool)
        W_act = W[active]
        loss_act = loss[active]
        todo = np.arange(active.size)
        while todo.size:
            cand = W_act[todo] - trial_eta[todo, None, None] * G[todo]
            cl, cp = _batch_state(XbT, y_idx, cand, ridge, penal)
            ok = cl <= loss_act[todo] - ARMIJO * trial_eta[todo] * g2[todo]
            acc = todo[ok]
            W[active[acc]] = cand[ok]
            loss[active[acc]] = cl[ok]
            P[active[acc]] = cp[ok]
            give_up = ~ok & (trial_eta[todo] < MIN_STEP)
            # a line search that bottoms out means no further descent is possible
            stalled[active[todo[give_up]]] = True
            todo = todo[~ok & ~give_up]
            first_try[todo] = False
            trial_eta[todo] *= 0.5
        eta[active] = trial_eta
        grow[active] = first_try
        iters[active] += 1
        G = gradient(active)
        gnorm[active] = np.sqrt((G ** 2).sum(axis=(1, 2)))
        if record_loss:
            history.append(loss.copy())
    return BatchFit(W, loss, gnorm, iters, history)


def predict_proba_linear(W: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Class probabilities for weights of shape (K, p+1) or (B, K, p+1)."""
    Xb = add_bias(X)
    if W.ndim == 2:
        return softmax(Xb @ W.T)
    return softmax(np.matmul(Xb, np.transpose(W, (0, 2, 1))))
