"""Entropies, mutual information, and two-sided correlation-cost brackets.

All entropies are in bits.  Mutual information across a cut is evaluated
either from an explicit table or from a half-chain factorization; the latter
streams over row blocks so the full joint table never has to fit in memory
at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .canonical import cut_spectrum
from .core import (
    BipartiteFactorization,
    ProbabilityTable,
    StochasticMPS,
    contract_to_table,
    factorize_at_cut,
    l1_distance,
)
from .errors import InconsistencyError, NotNormalizedError

_LN2 = math.log(2.0)
# mutual_information and pinsker_gap accept inputs whose mass deviates from 1
# by at most this much.
JOINT_MASS_TOL = 1e-9
# entropy_cost_bracket compares candidate tables against the reference at
# this L1 tolerance (only when the dense tables are small enough to build).
CONSISTENCY_TOL = 1e-8
_CONSISTENCY_MAX_CELLS = 2**12
# row-block size limit for streaming over a factorized joint table
_STREAM_CELLS = 2**22


def shannon_entropy(probabilities, *, check: bool = True) -> float:
    """Entropy in bits of a probability vector; zero entries contribute zero.

    With ``check`` enabled the vector must be nonnegative and sum to 1 within
    1e-9.
    """
    p = np.asarray(probabilities, dtype=float).ravel()
    if check:
        if p.size == 0:
            raise ValueError("empty probability vector")
        if np.any(p < -1e-12):
            raise ValueError("negative probability")
        total = p.sum()
        if abs(total - 1.0) > JOINT_MASS_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
    # entries are clamped to [0, 1] so float noise like 1 + 1e-15 cannot
    # drive the result negative
    return float(entr(np.clip(p, 0.0, 1.0)).sum() / _LN2) + 0.0


def _bipartite_moments(joint, cut):
    """Shared accumulation pass: (H_A, H_B, H_AB, L1 distance to product).

    ``joint`` is a ProbabilityTable or a BipartiteFactorization; ``cut`` is
    required for tables and optional (but checked) for factorizations.
    """
    if isinstance(joint, ProbabilityTable):
        if cut is None:
            raise ValueError("cut is required for a dense table")
        if not 1 <= cut <= joint.num_sites - 1:
            raise ValueError(f"cut must lie in 1..{joint.num_sites - 1}")
        if not joint.normalized:
            raise NotNormalizedError("mutual information requires a normalized table")
        w = joint.weights.reshape(joint.local_dim**cut, -1)
        pa = w.sum(axis=1)
        pb = w.sum(axis=0)
        h_ab = float(entr(w).sum() / _LN2)
        l1 = float(np.abs(w - np.outer(pa, pb)).sum())
    elif isinstance(joint, BipartiteFactorization):
        if cut is not None and cut != joint.cut:
            raise ValueError(f"cut {cut} does not match factorization cut {joint.cut}")
        total = joint.total_mass()
        if abs(total - 1.0) > JOINT_MASS_TOL:
            raise NotNormalizedError(f"joint mass is {total!r}, expected 1")
        lv, rv = joint.left_vectors, joint.right_vectors
        pa = lv @ rv.sum(axis=0)
        pb = rv @ lv.sum(axis=0)
        rows = max(1, _STREAM_CELLS // max(1, rv.shape[0]))
        h_ab = 0.0
        l1 = 0.0
        for start in range(0, lv.shape[0], rows):
            block = lv[start : start + rows] @ rv.T
            h_ab += float(entr(block).sum())
            l1 += float(np.abs(block - np.outer(pa[start : start + rows], pb)).sum())
        h_ab /= _LN2
    else:
        raise TypeError(f"unsupported joint type {type(joint).__name__}")
    h_a = float(entr(np.clip(pa, 0.0, None)).sum() / _LN2)
    h_b = float(entr(np.clip(pb, 0.0, None)).sum() / _LN2)
    return h_a, h_b, h_ab, l1


def mutual_information(joint, cut: int | None = None) -> float:
    """Mutual information in bits between the two blocks of a cut.

    Computed as H(A) + H(B) - H(A,B) and clipped at zero to absorb float
    cancellation on (near-)product distributions.
    """
    h_a, h_b, h_ab, _ = _bipartite_moments(joint, cut)
    return max(h_a + h_b - h_ab, 0.0)


def pinsker_gap(joint, cut: int | None = None):
    """Both sides of the quadratic total-variation bound.

    Returns ``(lhs, rhs)`` with ``lhs`` the squared L1 distance between the
    joint and the product of its marginals and ``rhs`` two times ln 2 times
    the mutual information in bits; ``lhs <= rhs`` always holds.
    """
    h_a, h_b, h_ab, l1 = _bipartite_moments(joint, cut)
    mi = max(h_a + h_b - h_ab, 0.0)
    return l1 * l1, 2.0 * _LN2 * mi


@dataclass(frozen=True)
class EntropyCostBracket:
    """Two-sided bracket on the entropy any latent common source must carry.

    ``lower_bound`` is the mutual information across the cut (no stochastic
    channel pair can do with less); ``upper_bound`` is the smallest spectrum
    entropy among the supplied representations (that source demonstrably
    suffices); ``achieved_by`` labels the winning representation.
    """

    cut: int
    lower_bound: float
    upper_bound: float
    achieved_by: str

    def __post_init__(self):
        if self.lower_bound > self.upper_bound + 1e-9:
            raise InconsistencyError(
                f"lower bound {self.lower_bound} exceeds upper bound {self.upper_bound}"
            )


def entropy_cost_bracket(
    mps: StochasticMPS, cut: int, candidates
) -> EntropyCostBracket:
    """Bracket the correlation cost at a cut using candidate representations.

    ``candidates`` is an ordered mapping or iterable of ``(label, mps)`` pairs
    that must all represent the same distribution as ``mps``; when the dense
    tables are small enough this is verified outright, otherwise each is
    required to be certified normalized with matching shape.  Ties go to the
    earliest candidate.
    """
    if hasattr(candidates, "items"):
        items = list(candidates.items())
    else:
        items = list(candidates)
    if not items:
        raise ValueError("at least one candidate representation is required")
    cells = mps.local_dim**mps.num_sites
    reference = contract_to_table(mps) if cells <= _CONSISTENCY_MAX_CELLS else None
    best_label = None
    best_entropy = math.inf
    for label, cand in items:
        if (cand.local_dim, cand.num_sites) != (mps.local_dim, mps.num_sites):
            raise InconsistencyError(f"candidate {label!r} has mismatched shape")
        if reference is not None:
            dist = l1_distance(reference, contract_to_table(cand))
            if dist > CONSISTENCY_TOL:
                raise InconsistencyError(
                    f"candidate {label!r} deviates from reference by L1 {dist:.3e}"
                )
        elif not cand.normalized:
            raise NotNormalizedError(f"candidate {label!r} is not normalized")
        h = shannon_entropy(cut_spectrum(cand, cut).probabilities, check=False)
        if h < best_entropy - 1e-15:
            best_entropy = h
            best_label = label
    lower = mutual_information(factorize_at_cut(mps, cut))
    return EntropyCostBracket(cut, lower, best_entropy, best_label)
