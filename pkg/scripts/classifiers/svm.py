"""
RBF-kernel soft-margin SVM trained by sequential minimal optimization.

The dual  min 1/2 a^T Q a - e^T a,  0 <= a_i <= C,  y^T a = 0,  with
Q_ij = y_i y_j K(x_i, x_j), is solved two multipliers at a time. Each step
picks the maximal violating pair; the solver stops when the violation
drops below the KKT tolerance.
"""

import logging
from typing import Optional

import numpy as np
from scipy.special import expit
from tqdm import tqdm

from .constants import KKT_TOLERANCE, SVM_C, SVM_GAMMA, SVM_MAX_ITER, SVM_TAU
from .errors import ConvergenceError, TrainingError
from .models import SvmModel

logger = logging.getLogger(__name__)


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """exp(-gamma * |a_i - b_j|^2) for every row pair."""
    sq = (
        np.sum(a ** 2, axis=1)[:, None]
        + np.sum(b ** 2, axis=1)[None, :]
        - 2 * a @ b.T
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def standardize_fit(features: np.ndarray):
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale[scale == 0] = 1.0
    return mean, scale


def _to_signed(labels) -> np.ndarray:
    y = np.asarray(labels)
    signed = np.where(y > 0, 1.0, -1.0)
    if not np.all(np.isin(y, (0, 1, -1))):
        raise ValueError("labels must be 0/1 or -1/+1")
    return signed


def _select_pair(y, alpha, grad, C):
    """Maximal violating pair (i, j) and the violation m - M."""
    minus_yg = -y * grad
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    if not np.any(up) or not np.any(low):
        return None, None, 0.0
    i = int(np.flatnonzero(up)[np.argmax(minus_yg[up])])
    j = int(np.flatnonzero(low)[np.argmin(minus_yg[low])])
    return i, j, float(minus_yg[i] - minus_yg[j])


def _bias(y, alpha, grad, C) -> float:
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if np.any(free):
        rho = float(yg[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
        ub = float(yg[ub_mask].min()) if np.any(ub_mask) else np.inf
        lb = float(yg[lb_mask].max()) if np.any(lb_mask) else -np.inf
        if np.isfinite(ub) and np.isfinite(lb):
            rho = (ub + lb) / 2
        else:
            rho = ub if np.isfinite(ub) else lb
    return -rho


def svm_train(
    features,
    labels,
    C: float = SVM_C,
    gamma: float = SVM_GAMMA,
    seed: int = 0,
    tol: float = KKT_TOLERANCE,
    max_iter: int = SVM_MAX_ITER,
    progress: bool = False,
) -> SvmModel:
    """
    Fit on (n, d) features with 0/1 (or -1/+1) labels.

    Features are standardized per column first. The seed fixes the order
    the points are visited in, which only decides ties.
    """
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = _to_signed(labels)
    if len(x) != len(y):
        raise ValueError(f"{len(x)} feature rows but {len(y)} labels")
    if not np.any(y > 0) or not np.any(y < 0):
        raise TrainingError("SVM training needs at least one sample of each class")
    if C <= 0 or gamma <= 0:
        raise ValueError("C and gamma must be positive")

    order = np.random.default_rng(seed).permutation(len(x))
    x, y = x[order], y[order]
    mean, scale = standardize_fit(x)
    z = (x - mean) / scale
    K = rbf_kernel(z, z, gamma)
    diag = np.diag(K).copy()

    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    violation = np.inf
    iterations = 0
    bar = tqdm(total=max_iter, desc="SMO", disable=not progress, leave=False)
    while True:
        i, j, violation = _select_pair(y, alpha, grad, C)
        if i is None or violation < tol:
            break
        if iterations >= max_iter:
            bar.close()
            raise ConvergenceError(
                f"SMO stopped after {iterations} iterations: max KKT violation {violation:.3g}, tolerance {tol}"
            )
        iterations += 1
        bar.update(1)

        Q_i = y[i] * y * K[i]
        Q_j = y[j] * y * K[j]
        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(diag[i] + diag[j] + 2 * Q_i[j], SVM_TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = max(diag[i] + diag[j] - 2 * Q_i[j], SVM_TAU)
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += Q_i * (alpha[i] - old_i) + Q_j * (alpha[j] - old_j)
    bar.close()

    bias = _bias(y, alpha, grad, C)
    support = alpha > 0
    logger.debug(
        f"SMO converged in {iterations} iterations: {int(support.sum())}/{n} support vectors, "
        f"violation {violation:.2g}"
    )
    return SvmModel(
        support_vectors=z[support],
        dual_coefficients=alpha[support],
        labels=y[support],
        bias=bias,
        rbf_gamma=gamma,
        regularization_C=C,
        feature_mean=mean,
        feature_scale=scale,
    )


def svm_margin(model: SvmModel, features) -> np.ndarray:
    x = np.atleast_2d(np.asarray(features, dtype=float))
    if x.shape[1] != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, got {x.shape[1]}")
    z = (x - model.feature_mean) / model.feature_scale
    K = rbf_kernel(z, model.support_vectors, model.rbf_gamma)
    return K @ (model.dual_coefficients * model.labels) + model.bias


def svm_predict(model: SvmModel, features, margin: Optional[np.ndarray] = None) -> np.ndarray:
    """Scores sigmoid(margin) in [0, 1]; above 0.5 exactly when the margin is positive."""
    if margin is None:
        margin = svm_margin(model, features)
    return expit(margin)
