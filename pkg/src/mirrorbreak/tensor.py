"""Dense complex tensor arithmetic: contraction, axis permutation, and
truncated singular value decomposition.

Tensors are plain ``numpy.ndarray`` objects of dtype complex128 in row-major
(C) layout; that linearization is the single source of truth for all index
arithmetic in the package. Every other module reshapes and permutes only
through the operations defined here (or the equivalent numpy calls on values
produced here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Singular values closer than this to the truncation boundary are kept
# together so that degenerate multiplets are never split.
TIE_TOLERANCE = 1e-12


class ZeroTensorError(ValueError):
    """Raised when an SVD is requested for an all-zero tensor."""


class SvdConvergenceError(RuntimeError):
    """Raised when the SVD backend fails even after a perturbed retry."""


@dataclass(frozen=True)
class TruncatedSVD:
    """Result of a truncated SVD of a matricized tensor.

    ``u`` has shape (prod(left extents), r) with orthonormal columns,
    ``v`` has shape (r, prod(right extents)) with orthonormal rows, and
    ``u @ diag(s) @ v`` reconstructs the matricized input up to the
    reported ``discarded_weight`` (sum of squared dropped singular values
    divided by the sum of all squared singular values).
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    discarded_weight: float

    @property
    def rank(self) -> int:
        return len(self.s)


def contract(a: np.ndarray, b: np.ndarray, axis_pairs: list[tuple[int, int]]) -> np.ndarray:
    """Contract ``a`` with ``b`` over the given (axis-of-a, axis-of-b) pairs.

    The result carries the uncontracted axes of ``a`` (in order) followed by
    the uncontracted axes of ``b``. An empty ``axis_pairs`` yields the outer
    product.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    axes_a = [p[0] for p in axis_pairs]
    axes_b = [p[1] for p in axis_pairs]
    for ia, ib in axis_pairs:
        if not (0 <= ia < a.ndim):
            raise ValueError(f"axis {ia} out of range for tensor of rank {a.ndim}")
        if not (0 <= ib < b.ndim):
            raise ValueError(f"axis {ib} out of range for tensor of rank {b.ndim}")
        if a.shape[ia] != b.shape[ib]:
            raise ValueError(
                f"extent mismatch on pair ({ia}, {ib}): {a.shape[ia]} != {b.shape[ib]}"
            )
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise ValueError("repeated axis in contraction pairs")
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def permute_axes(t: np.ndarray, order: tuple[int, ...]) -> np.ndarray:
    """Reorder axes so that result axis k is input axis ``order[k]``."""
    t = np.asarray(t)
    if sorted(order) != list(range(t.ndim)):
        raise ValueError(f"order {order!r} is not a permutation of {t.ndim} axes")
    return np.transpose(t, order)


def svd_truncate(t: np.ndarray, split: int, epsilon: float, chi_max: int) -> TruncatedSVD:
    """Truncated SVD of ``t`` matricized between axis groups [0:split) and [split:).

    ``epsilon`` is a relative cutoff: the kept rank is the smallest r whose
    relative discarded squared weight is at most epsilon**2, further capped
    at ``chi_max``. Singular values within ``TIE_TOLERANCE`` of the boundary
    value are kept together (up to ``chi_max``) so truncation is
    deterministic under degeneracies. At least one singular value is always
    kept.
    """
    t = np.asarray(t, dtype=np.complex128)
    if not (1 <= split < t.ndim):
        raise ValueError(f"split {split} must satisfy 1 <= split < rank {t.ndim}")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if chi_max < 1:
        raise ValueError("chi_max must be >= 1")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite amplitudes")

    rows = int(np.prod(t.shape[:split], dtype=np.int64))
    cols = int(np.prod(t.shape[split:], dtype=np.int64))
    m = t.reshape(rows, cols)
    if not np.any(m):
        raise ZeroTensorError("cannot decompose an all-zero tensor")

    u, s, v = _svd_with_retry(m)
    r = truncation_rank(s, epsilon, chi_max)

    weights = s * s
    total = float(weights.sum())
    discarded = float(weights[r:].sum() / total)
    return TruncatedSVD(u=u[:, :r], s=s[:r].copy(), v=v[:r, :], discarded_weight=discarded)


def truncation_rank(s: np.ndarray, epsilon: float, chi_max: int) -> int:
    """Kept rank for a descending spectrum under the relative cutoff: the
    smallest r whose relative discarded squared weight is <= epsilon**2,
    extended over ties at the boundary, capped at chi_max, and at least 1.
    """
    weights = s * s
    total = float(weights.sum())
    suffix = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    budget = (epsilon * epsilon) * total
    r = len(s)
    for k in range(1, len(s) + 1):
        if suffix[k] <= budget:
            r = k
            break
    boundary = s[r - 1]
    while r < len(s) and s[r] >= boundary - TIE_TOLERANCE:
        r += 1
    return min(r, chi_max)


def _svd_with_retry(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        # one retry on a deterministically perturbed copy, then give up
        scale = 1e-14 * np.linalg.norm(m)
        rng = np.random.default_rng(0)
        perturbed = m + scale * rng.standard_normal(m.shape)
        try:
            return np.linalg.svd(perturbed, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise SvdConvergenceError("SVD failed to converge after perturbed retry") from exc
