"""L2-regularized multinomial logistic regression by gradient descent."""
import logging

import numpy as np

from .gbt import softmax

log = logging.getLogger(__name__)


def _design(X):
    return np.hstack([X, np.ones((X.shape[0], 1))])


def loss_and_grad(W, Xd, onehot, reg_lambda):
    """Mean cross-entropy plus (lambda/2)*|W|^2 over non-bias weights, and its gradient.

    ``W`` has shape (classes, features + 1); the last column is the bias.
    """
    n = Xd.shape[0]
    scores = Xd @ W.T
    z = scores - scores.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -(onehot * (z - lse)).sum() / n
    Wr = W[:, :-1]
    loss += 0.5 * reg_lambda * float((Wr * Wr).sum())
    p = np.exp(z - lse)
    grad = (p - onehot).T @ Xd / n
    grad[:, :-1] += reg_lambda * Wr
    return float(loss), grad


def train_logreg(X, y, hp: dict, seed: int = 0) -> dict:
    classes = np.unique(y)
    onehot = (y[:, None] == classes[None, :]).astype(float)
    Xd = _design(np.asarray(X, dtype=float))
    W = np.zeros((len(classes), Xd.shape[1]))
    lam = float(hp["reg_lambda"])
    loss, grad = loss_and_grad(W, Xd, onehot, lam)
    step = 1.0
    iters = 0
    converged = False
    for iters in range(1, int(hp["max_iters"]) + 1):
        gnorm2 = float((grad * grad).sum())
        if np.sqrt(gnorm2) < hp["grad_tol"]:
            converged = True
            break
        # Armijo backtracking, warm-started from the previous step
        step *= 2.0
        while True:
            W_new = W - step * grad
            new_loss, new_grad = loss_and_grad(W_new, Xd, onehot, lam)
            if new_loss <= loss - 1e-4 * step * gnorm2 or step < 1e-12:
                break
            step *= 0.5
        W, loss, grad = W_new, new_loss, new_grad
    if not converged:
        log.warning("logistic regression stopped at the iteration cap (%d), |grad| = %.3g",
                    iters, float(np.sqrt((grad * grad).sum())))
    return {"classes": classes.tolist(), "weights": W, "iterations": iters}


def predict_logreg(params: dict, X) -> np.ndarray:
    scores = _design(np.asarray(X, dtype=float)) @ np.asarray(params["weights"]).T
    return np.asarray(params["classes"])[np.argmax(scores, axis=1)]
