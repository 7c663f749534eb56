"""Matrix product operator and state chains: identity construction, gate
absorption from either side, canonical-form compression, application to the
all-zero state, dense materialization for small systems, and exact
conditional sampling.

Site tensor axes are (left bond, top physical, bottom physical, right bond)
for operators and (left bond, physical, right bond) for states; site i holds
qubit i. The top legs are the operator's output index, so absorbing a gate
from the left realizes G.M and from the right M.G. Chains carry a scalar
``log_norm``: the represented object is exp(log_norm) times the contraction
of the stored tensors.

Operations are functional: they return new chains and never mutate inputs.
Site arrays may be shared between chains, so callers must not write into
them either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Gate, gate_unitary
from .tensor import svd_truncate

DENSE_GUARD_QUBITS = 12


@dataclass(frozen=True)
class MatrixProductOperator:
    sites: tuple[np.ndarray, ...]
    log_norm: float = 0.0
    # index of the site holding the chain norm; None when unknown
    center: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        for i, s in enumerate(self.sites):
            if s.ndim != 4 or s.shape[1] != 2 or s.shape[2] != 2:
                raise ValueError(f"site {i} has bad shape {s.shape}")
        if self.sites[0].shape[0] != 1 or self.sites[-1].shape[3] != 1:
            raise ValueError("boundary bonds must have extent 1")
        for i in range(len(self.sites) - 1):
            if self.sites[i].shape[3] != self.sites[i + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {i} and {i + 1}")

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    def bond_dims(self) -> tuple[int, ...]:
        """Extents of the N-1 internal bonds."""
        return tuple(s.shape[3] for s in self.sites[:-1])


@dataclass(frozen=True)
class MatrixProductState:
    sites: tuple[np.ndarray, ...]
    log_norm: float = 0.0
    center: int | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        for i, s in enumerate(self.sites):
            if s.ndim != 3 or s.shape[1] != 2:
                raise ValueError(f"site {i} has bad shape {s.shape}")
        if self.sites[0].shape[0] != 1 or self.sites[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have extent 1")
        for i in range(len(self.sites) - 1):
            if self.sites[i].shape[2] != self.sites[i + 1].shape[0]:
                raise ValueError(f"bond mismatch between sites {i} and {i + 1}")

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    def bond_dims(self) -> tuple[int, ...]:
        return tuple(s.shape[2] for s in self.sites[:-1])


def identity_mpo(n: int) -> MatrixProductOperator:
    """Identity operator with all bond extents 1."""
    if n < 1:
        raise ValueError("need at least one site")
    site = np.eye(2, dtype=np.complex128).reshape(1, 2, 2, 1)
    return MatrixProductOperator(tuple(site.copy() for _ in range(n)), 0.0, None)


def total_elements(m: MatrixProductOperator) -> int:
    return sum(s.size for s in m.sites)


def frobenius_norm(m: MatrixProductOperator) -> float:
    """Frobenius norm of the stored chain (excluding the log_norm factor)."""
    if m.center is not None:
        return float(np.linalg.norm(m.sites[m.center]))
    env = np.ones((1, 1), dtype=np.complex128)
    for s in m.sites:
        env = np.einsum("ab,atpr,btpq->rq", env, np.conj(s), s)
    return float(math.sqrt(abs(env[0, 0].real)))


# --------------------------------------------------------------------------
# canonical-form plumbing
# --------------------------------------------------------------------------


def _qr_right(sites: list[np.ndarray], i: int) -> None:
    """Left-orthogonalize site i, pushing the remainder into site i+1."""
    s = sites[i]
    l, t, b, r = s.shape
    q, rem = np.linalg.qr(s.reshape(l * t * b, r))
    sites[i] = q.reshape(l, t, b, q.shape[1])
    sites[i + 1] = np.tensordot(rem, sites[i + 1], axes=(1, 0))


def _qr_left(sites: list[np.ndarray], i: int) -> None:
    """Right-orthogonalize site i, pushing the remainder into site i-1."""
    s = sites[i]
    l, t, b, r = s.shape
    q, rem = np.linalg.qr(s.reshape(l, t * b * r).T)
    sites[i] = q.T.reshape(q.shape[1], t, b, r)
    sites[i - 1] = np.tensordot(sites[i - 1], rem.T, axes=(3, 0))


def move_center(m: MatrixProductOperator, target: int) -> MatrixProductOperator:
    """Exact (QR-based) move of the orthogonality center to ``target``."""
    n = m.num_sites
    if not (0 <= target < n):
        raise ValueError(f"center target {target} out of range")
    sites = list(m.sites)
    if m.center is None:
        for i in range(0, target):
            _qr_right(sites, i)
        for i in range(n - 1, target, -1):
            _qr_left(sites, i)
    elif m.center < target:
        for i in range(m.center, target):
            _qr_right(sites, i)
    else:
        for i in range(m.center, target, -1):
            _qr_left(sites, i)
    return MatrixProductOperator(tuple(sites), m.log_norm, target)


def _gate_tensor(g: Gate) -> np.ndarray:
    """Gate as (out_lo, out_hi, in_lo, in_hi) with the pair ordered by site
    index, regardless of the order the qubits were listed on the gate."""
    u4 = gate_unitary(g).reshape(2, 2, 2, 2)
    if g.qubits[0] > g.qubits[1]:
        u4 = u4.transpose(1, 0, 3, 2)
    return u4


def _split_pair(
    theta: np.ndarray, epsilon: float, chi_max: int
) -> tuple[np.ndarray, np.ndarray]:
    """Split a two-site blob (l,t1,b1,t2,b2,r) back into site tensors; the
    singular values stay on the right factor (center moves to the right)."""
    l, t1, b1, t2, b2, r = theta.shape
    dec = svd_truncate(theta, split=3, epsilon=epsilon, chi_max=chi_max)
    k = dec.rank
    left = dec.u.reshape(l, t1, b1, k)
    right = (dec.s[:, None] * dec.v).reshape(k, t2, b2, r)
    return left, right


def _pair_blob(sites, i: int) -> np.ndarray:
    return np.tensordot(sites[i], sites[i + 1], axes=(3, 0))


def absorb_gate(
    m: MatrixProductOperator,
    g: Gate,
    side: str,
    epsilon: float,
    chi_max: int,
) -> MatrixProductOperator:
    """Contract a gate into the chain. ``side="left"`` multiplies on the top
    (output) legs so the result represents G.M; ``side="right"`` multiplies
    on the bottom legs giving M.G. Two-qubit gates must act on adjacent
    sites; the center is moved to the gate first so the truncated re-split
    at the gate's bond is locally optimal. Single-qubit gates are a plain
    contraction with no SVD.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be left or right, got {side!r}")
    if len(g.qubits) == 1:
        u = gate_unitary(g)
        q = g.qubits[0]
        site = m.sites[q]
        if side == "left":
            new = np.einsum("tk,lkbr->ltbr", u, site)
        else:
            new = np.einsum("ltkr,kb->ltbr", site, u)
        sites = list(m.sites)
        sites[q] = new
        # a unitary single-site contraction preserves the canonical structure
        return MatrixProductOperator(tuple(sites), m.log_norm, m.center)

    a, b = g.qubits
    if abs(a - b) != 1:
        raise ValueError(f"two-qubit gate on non-adjacent sites {g.qubits}")
    i = min(a, b)
    m = move_center(m, i)
    sites = list(m.sites)
    theta = _pair_blob(sites, i)  # (l, t1, b1, t2, b2, r)
    u4 = _gate_tensor(g)  # (x, y, t, u): G[(x,y),(t,u)]
    if side == "left":
        # (G.M): new tops x,y contract gate inputs with old tops
        theta = np.einsum("xytu,ltbuar->lxbyar", u4, theta)
    else:
        # (M.G): old bottoms b,a are G's outputs; new bottoms x,y
        theta = np.einsum("ltbuar,baxy->ltxuyr", theta, u4)
    sites[i], sites[i + 1] = _split_pair(theta, epsilon, chi_max)
    return MatrixProductOperator(tuple(sites), m.log_norm, i + 1)


def apply_swap_boundary(
    m: MatrixProductOperator,
    bond: int,
    side: str,
    epsilon: float,
    chi_max: int,
) -> MatrixProductOperator:
    """Apply a SWAP on sites (bond, bond+1) to the top legs (``left``), the
    bottom legs (``right``), or both, then re-truncate that bond locally.
    """
    if side not in ("left", "right", "both"):
        raise ValueError(f"side must be left, right or both, got {side!r}")
    if not (0 <= bond <= m.num_sites - 2):
        raise ValueError(f"bond {bond} out of range")
    return _pair_swap(
        m, bond, swap_top=side in ("left", "both"), swap_bottom=side in ("right", "both"),
        epsilon=epsilon, chi_max=chi_max,
    )


def _pair_swap(
    m: MatrixProductOperator,
    bond: int,
    swap_top: bool,
    swap_bottom: bool,
    epsilon: float,
    chi_max: int,
) -> MatrixProductOperator:
    """Exchange physical legs across a bond and re-truncate it. With both
    flags false this is a plain local re-truncation of the bond."""
    m = move_center(m, bond)
    sites = list(m.sites)
    theta = _pair_blob(sites, bond)  # (l, t1, b1, t2, b2, r)
    if swap_top:
        theta = theta.transpose(0, 3, 2, 1, 4, 5)
    if swap_bottom:
        theta = theta.transpose(0, 1, 4, 3, 2, 5)
    sites[bond], sites[bond + 1] = _split_pair(theta, epsilon, chi_max)
    return MatrixProductOperator(tuple(sites), m.log_norm, bond + 1)


def compress(
    m: MatrixProductOperator, epsilon: float, chi_max: int
) -> MatrixProductOperator:
    """Two-sided sweep: left-to-right orthogonalization, then right-to-left
    truncation at the relative cutoff. The chain comes back right-canonical
    (center at site 0) with unit stored norm; the scale moves to log_norm.
    """
    n = m.num_sites
    sites = list(m.sites)
    for i in range(n - 1):
        _qr_right(sites, i)
    for i in range(n - 1, 0, -1):
        s = sites[i]
        l, t, b, r = s.shape
        dec = svd_truncate(s, split=1, epsilon=epsilon, chi_max=chi_max)
        k = dec.rank
        sites[i] = dec.v.reshape(k, t, b, r)
        carry = dec.u * dec.s[None, :]
        sites[i - 1] = np.tensordot(sites[i - 1], carry, axes=(3, 0))
    f = float(np.linalg.norm(sites[0]))
    if f == 0.0:
        raise ValueError("compress reached an all-zero chain")
    sites[0] = sites[0] / f
    return MatrixProductOperator(tuple(sites), m.log_norm + math.log(f), 0)


# --------------------------------------------------------------------------
# application to |0...0> and sampling
# --------------------------------------------------------------------------


def apply_to_zero(
    m: MatrixProductOperator, epsilon: float, chi_max: int
) -> MatrixProductState:
    """Select the all-zero input column of the operator, compress, and
    normalize; the state norm is recorded in log_norm. Raises if the column
    norm collapses relative to the operator's scale (catastrophic
    truncation upstream).
    """
    mpo_scale = frobenius_norm(m)
    sites = [s[:, :, 0, :] for s in m.sites]
    n = len(sites)
    for i in range(n - 1):
        s = sites[i]
        l, p, r = s.shape
        q, rem = np.linalg.qr(s.reshape(l * p, r))
        sites[i] = q.reshape(l, p, q.shape[1])
        sites[i + 1] = np.tensordot(rem, sites[i + 1], axes=(1, 0))
    for i in range(n - 1, 0, -1):
        s = sites[i]
        l, p, r = s.shape
        dec = svd_truncate(s, split=1, epsilon=epsilon, chi_max=chi_max)
        sites[i] = dec.v.reshape(dec.rank, p, r)
        sites[i - 1] = np.tensordot(sites[i - 1], dec.u * dec.s[None, :], axes=(2, 0))
    f = float(np.linalg.norm(sites[0]))
    expected = mpo_scale / (2 ** (n / 2))
    if f < 1e-12 * expected:
        raise ValueError(
            f"all-zero column norm {f:.3e} collapsed below 1e-12 of the expected "
            f"scale {expected:.3e}; upstream truncation destroyed the state"
        )
    sites[0] = sites[0] / f
    return MatrixProductState(tuple(sites), m.log_norm + math.log(f), 0)


def _right_canonicalize(psi: MatrixProductState) -> tuple[list[np.ndarray], float]:
    sites = list(psi.sites)
    n = len(sites)
    start = psi.center if psi.center is not None else n - 1
    if psi.center is None:
        for i in range(n - 1):
            s = sites[i]
            l, p, r = s.shape
            q, rem = np.linalg.qr(s.reshape(l * p, r))
            sites[i] = q.reshape(l, p, q.shape[1])
            sites[i + 1] = np.tensordot(rem, sites[i + 1], axes=(1, 0))
    for i in range(start, 0, -1):
        s = sites[i]
        l, p, r = s.shape
        q, rem = np.linalg.qr(s.reshape(l, p * r).T)
        sites[i] = q.T.reshape(q.shape[1], p, r)
        sites[i - 1] = np.tensordot(sites[i - 1], rem.T, axes=(2, 0))
    return sites, float(np.linalg.norm(sites[0]))


def sample(psi: MatrixProductState, shots: int, seed: int) -> list[str]:
    """Draw i.i.d. bitstrings from |<x|psi>|^2, qubit 0 leftmost.

    Sweeps the sites left to right, sampling each qubit conditioned on the
    previous ones; all shots advance together so the sweep is vectorized.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    sites, norm = _right_canonicalize(psi)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"state is not normalized (stored norm {norm:.6g})")
    rng = np.random.default_rng(seed)
    n = len(sites)
    envs = np.ones((shots, 1), dtype=np.complex128)
    bits = np.empty((shots, n), dtype=np.int8)
    for i in range(n):
        amps = np.einsum("sl,lpr->spr", envs, sites[i])
        probs = np.sum(np.abs(amps) ** 2, axis=2)  # (shots, 2)
        totals = probs.sum(axis=1)
        p_one = probs[:, 1] / totals
        draw = (rng.random(shots) < p_one).astype(np.int8)
        bits[:, i] = draw
        chosen = amps[np.arange(shots), draw, :]
        chosen_p = probs[np.arange(shots), draw]
        envs = chosen / np.sqrt(chosen_p)[:, None]
    return ["".join("1" if b else "0" for b in row) for row in bits]


# --------------------------------------------------------------------------
# dense materialization (test bridge, small n only)
# --------------------------------------------------------------------------


def mpo_to_dense(m: MatrixProductOperator) -> np.ndarray:
    """Exact 2**n x 2**n matrix, row/column indices little-endian in the
    qubit number (qubit 0 = least significant bit)."""
    n = m.num_sites
    if n > DENSE_GUARD_QUBITS:
        raise ValueError(f"dense materialization capped at {DENSE_GUARD_QUBITS} sites")
    cur = m.sites[0][0]  # (t0, b0, r)
    for s in m.sites[1:]:
        cur = np.tensordot(cur, s, axes=(-1, 0))
    cur = cur[..., 0]  # axes: t0, b0, t1, b1, ...
    tops = [2 * i for i in range(n)]
    bots = [2 * i + 1 for i in range(n)]
    order = tops[::-1] + bots[::-1]
    dense = cur.transpose(order).reshape(2**n, 2**n)
    return dense * math.exp(m.log_norm)


def mps_to_dense(psi: MatrixProductState) -> np.ndarray:
    """Exact 2**n amplitude vector, little-endian in the qubit number."""
    n = psi.num_sites
    if n > DENSE_GUARD_QUBITS:
        raise ValueError(f"dense materialization capped at {DENSE_GUARD_QUBITS} sites")
    cur = psi.sites[0][0]  # (p0, r)
    for s in psi.sites[1:]:
        cur = np.tensordot(cur, s, axes=(-1, 0))
    cur = cur[..., 0]
    vec = cur.transpose(tuple(range(n))[::-1]).reshape(-1)
    return vec * math.exp(psi.log_norm)
