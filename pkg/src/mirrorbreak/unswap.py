"""Greedy extraction of hidden permutations from an operator chain.

Swap obfuscation inflates bond dimensions without adding entanglement. This
module repeatedly tries nearest-neighbor SWAPs on the chain's outer legs and
keeps the ones that shrink the targeted bond, factoring the operator as

    input = P_left . reduced . P_right

where both factors are wire permutations. The sequential variant follows an
availability-set loop over bonds ranked by extent; the parity-parallel
variant sweeps batches of disjoint bonds per (side, parity) combination,
which tests floor(N/2) candidates per step instead of one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import MatrixProductOperator, _pair_blob, _split_pair, move_center, total_elements
from .routing import QubitPermutation
from .tensor import truncation_rank

# hard ceiling on candidate evaluations, well above the availability-set bound
_EVALUATION_SLACK = 16

_PARALLEL_CYCLE = (
    ("both", 0),
    ("both", 1),
    ("left", 0),
    ("left", 1),
    ("right", 0),
    ("right", 1),
)


@dataclass(frozen=True)
class UnswapConfig:
    epsilon: float
    chi_max: int
    acceptance: str = "strict"  # or "relaxed"
    strategy: str = "sequential"  # or "parity-parallel"
    max_outer_iterations: int = 20

    def __post_init__(self):
        if self.acceptance not in ("strict", "relaxed"):
            raise ValueError(f"acceptance must be strict or relaxed, got {self.acceptance!r}")
        if self.strategy not in ("sequential", "parity-parallel"):
            raise ValueError(
                f"strategy must be sequential or parity-parallel, got {self.strategy!r}"
            )
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")


@dataclass(frozen=True)
class UnswapResult:
    reduced: MatrixProductOperator
    left_perm: QubitPermutation
    right_perm: QubitPermutation
    accepted_swaps: int
    elements_before: int
    elements_after: int


class _Extraction:
    """Working state: the chain plus the accumulated outer permutations.

    Applying a swap S on the top legs turns M into S.M, so the original
    factors as M = S.(S.M): the left permutation gains the swap (its own
    inverse) on the inside. Operator order fixes the composition direction:
    the left permutation composes new swaps on the right, the right
    permutation on the left.
    """

    def __init__(self, m: MatrixProductOperator):
        self.m = m
        n = m.num_sites
        self.left = QubitPermutation.identity(n)
        self.right = QubitPermutation.identity(n)
        self.accepted = 0

    def accept(self, new_m: MatrixProductOperator, bond: int, side: str):
        n = self.m.num_sites
        tau = QubitPermutation.transposition(n, bond, bond + 1)
        if side in ("left", "both"):
            self.left = self.left.compose(tau)
        if side in ("right", "both"):
            self.right = tau.compose(self.right)
        self.m = new_m
        self.accepted += 1


def _swapped_blob(m: MatrixProductOperator, bond: int, side: str) -> np.ndarray:
    theta = _pair_blob(m.sites, bond)
    if side in ("left", "both"):
        theta = theta.transpose(0, 3, 2, 1, 4, 5)
    if side in ("right", "both"):
        theta = theta.transpose(0, 1, 4, 3, 2, 5)
    return theta


def _candidate_extent(
    m: MatrixProductOperator, bond: int, side: str, epsilon: float, chi_max: int
) -> int:
    """Bond extent the swap candidate would leave behind, from a values-only
    decomposition (cheaper than materializing the candidate chain)."""
    theta = _swapped_blob(m, bond, side)
    rows = theta.shape[0] * 4
    s = np.linalg.svd(theta.reshape(rows, -1), compute_uv=False)
    return truncation_rank(s, epsilon, chi_max)


def _apply_candidate(
    m: MatrixProductOperator, bond: int, side: str, epsilon: float, chi_max: int
) -> MatrixProductOperator:
    sites = list(m.sites)
    theta = _swapped_blob(m, bond, side)
    sites[bond], sites[bond + 1] = _split_pair(theta, epsilon, chi_max)
    return MatrixProductOperator(tuple(sites), m.log_norm, bond + 1)


def _normalize_bond(
    m: MatrixProductOperator, bond: int, epsilon: float, chi_max: int
) -> tuple[MatrixProductOperator, int]:
    """Move the center to the bond and re-truncate it, so candidate extents
    are compared against an honest baseline rather than stale slack."""
    m = move_center(m, bond)
    sites = list(m.sites)
    theta = _pair_blob(sites, bond)
    sites[bond], sites[bond + 1] = _split_pair(theta, epsilon, chi_max)
    out = MatrixProductOperator(tuple(sites), m.log_norm, bond + 1)
    return out, sites[bond].shape[3]


def _try_bond(
    state: _Extraction,
    bond: int,
    sides: tuple[str, ...],
    cfg: UnswapConfig,
    seen_this_pass: set | None,
) -> bool:
    """Evaluate swap candidates at one bond and accept the best admissible
    one. Returns True on acceptance. Ties prefer fewer swapped sides (left
    or right over both) and left over right, in the order of ``sides``.
    Candidates are ranked by values-only decompositions; only the accepted
    one is materialized.
    """
    m, baseline = _normalize_bond(state.m, bond, cfg.epsilon, cfg.chi_max)
    state.m = m
    best = None
    for side in sides:
        if seen_this_pass is not None and (bond, side) in seen_this_pass:
            continue
        extent = _candidate_extent(m, bond, side, cfg.epsilon, cfg.chi_max)
        if best is None or extent < best[1]:
            best = (side, extent)
    if best is None:
        return False
    side, extent = best
    if extent < baseline or (cfg.acceptance == "relaxed" and extent == baseline):
        if seen_this_pass is not None:
            seen_this_pass.add((bond, side))
        state.accept(_apply_candidate(m, bond, side, cfg.epsilon, cfg.chi_max), bond, side)
        return True
    return False


def unswap_sequential(m: MatrixProductOperator, cfg: UnswapConfig) -> UnswapResult:
    """Availability-set loop: pick the largest available bond (lowest index
    on ties), evaluate left/right/both swap candidates with local
    re-truncation, accept the best one iff it shrinks (strict) or does not
    grow (relaxed) that bond; acceptance re-enables the neighboring bonds.
    A pass ends when no bonds remain available; passes repeat until one
    accepts nothing or ``max_outer_iterations`` is reached.
    """
    state = _Extraction(m)
    before = total_elements(m)
    n = m.num_sites
    budget = cfg.max_outer_iterations * max(1, n - 1) * 3 * _EVALUATION_SLACK
    evaluations = 0
    for _ in range(cfg.max_outer_iterations):
        available = set(range(n - 1))
        seen = set() if cfg.acceptance == "relaxed" else None
        accepted_this_pass = 0
        while available:
            evaluations += 1
            if evaluations > budget:
                raise RuntimeError("unswap exceeded its evaluation budget")
            dims = state.m.bond_dims()
            bond = max(available, key=lambda i: (dims[i], -i))
            if _try_bond(state, bond, ("left", "right", "both"), cfg, seen):
                accepted_this_pass += 1
                available.discard(bond)
                if bond - 1 >= 0:
                    available.add(bond - 1)
                if bond + 1 <= n - 2:
                    available.add(bond + 1)
            else:
                available.discard(bond)
        if accepted_this_pass == 0:
            break
    return UnswapResult(
        reduced=state.m,
        left_perm=state.left,
        right_perm=state.right,
        accepted_swaps=state.accepted,
        elements_before=before,
        elements_after=total_elements(state.m),
    )


def unswap_parallel(m: MatrixProductOperator, cfg: UnswapConfig) -> UnswapResult:
    """Parity-batched variant: cycle through (both, left, right) x (even,
    odd) batches; within a batch all candidate pairs are disjoint, so their
    acceptance decisions are independent. Terminates when a full cycle
    produces no bond reduction, or after ``max_outer_iterations`` cycles.
    """
    state = _Extraction(m)
    before = total_elements(m)
    n = m.num_sites
    for _ in range(cfg.max_outer_iterations):
        reduced_any = False
        for side, parity in _PARALLEL_CYCLE:
            for bond in range(parity, n - 1, 2):
                dims_before = state.m.bond_dims()[bond]
                if _try_bond(state, bond, (side,), cfg, None):
                    if state.m.bond_dims()[bond] < dims_before:
                        reduced_any = True
        if not reduced_any:
            break
    return UnswapResult(
        reduced=state.m,
        left_perm=state.left,
        right_perm=state.right,
        accepted_swaps=state.accepted,
        elements_before=before,
        elements_after=total_elements(state.m),
    )


def unswap(m: MatrixProductOperator, cfg: UnswapConfig) -> UnswapResult:
    if cfg.strategy == "sequential":
        return unswap_sequential(m, cfg)
    return unswap_parallel(m, cfg)
