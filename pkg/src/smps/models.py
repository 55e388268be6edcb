"""Closed-form tensor stacks for two exactly solvable chains.

Ising chain: open chain of two-state spins with Boltzmann weights
``exp(-beta * s_k * s_{k+1})``.  The optimal two-channel factorization of the
bond transfer matrix yields a bond-dimension-2 stack whose cut spectrum is
the normalized pair of transfer-matrix eigenvalues, giving a closed-form
correlation cost.  (Flipping every other spin maps the chain onto the
opposite coupling sign, so the spectrum does not depend on the convention.)

Open asymmetric exclusion chain: particles hop right at unit rate, enter at
rate alpha, leave at rate beta.  The steady state admits exact matrix-product
representations built from a quadratic algebra; three inequivalent
finite-dimensional solutions exist (labelled I, II, III below) plus a scalar
solution on the line alpha + beta = 1, and which one carries the least
spectrum entropy depends on where (alpha, beta) falls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .core import StochasticMPS
from .errors import StructureError

_LN2 = math.log(2.0)
# |alpha + beta - 1| at or below this selects the scalar (product) solution
MEAN_FIELD_TOL = 1e-12
_ALGEBRA_TOL = 1e-12
# Ising couplings above this would overflow the raw Boltzmann tensors
_MAX_COUPLING = 300.0


@dataclass(frozen=True)
class IsingParams:
    """Coupling strength and chain length for the two-state spin chain."""

    beta: float
    num_sites: int

    def __post_init__(self):
        if not 0.0 <= self.beta <= _MAX_COUPLING:
            raise ValueError(f"beta must lie in [0, {_MAX_COUPLING}]")
        if self.num_sites < 2:
            raise ValueError("num_sites must be at least 2")


@dataclass(frozen=True)
class AsepParams:
    """Entry rate, exit rate, and chain length for the exclusion chain."""

    alpha: float
    beta: float
    num_sites: int

    def __post_init__(self):
        for name in ("alpha", "beta"):
            rate = getattr(self, name)
            if not 0.0 < rate <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.num_sites < 1:
            raise ValueError("num_sites must be at least 1")


def _ising_factors(beta: float):
    """Split the bond weight matrix M[s,s'] = exp(-beta*s*s') as Phi @ Psi.

    Columns of Phi (rows of Psi) are scaled so that both environment vectors
    of the resulting stack are proportional to the same scale vector, which
    makes the cut spectrum equal to the normalized eigenvalue pair of M.
    Spin +1 is symbol 0, spin -1 is symbol 1.
    """
    e2 = math.exp(-2.0 * beta)
    # normalized transfer-matrix eigenvalue magnitudes
    p = np.array([(1.0 + e2) / 2.0, (1.0 - e2) / 2.0])
    a = (1.0 + math.tanh(beta)) / 2.0
    f = np.array([[a, 0.0], [1.0 - a, 1.0]])
    g = np.array([[1.0 - a, 1.0], [a, 0.0]])
    scale = np.sqrt(4.0 * math.cosh(beta) * p)
    return f * scale, (g * scale).T


def ising_mps(params: IsingParams) -> StochasticMPS:
    """Normalized bond-dimension-2 stack for the open spin chain.

    Every interior cut of the result carries the optimal two-point spectrum,
    so its spectrum entropy equals :func:`ising_entropy_cost_exact`.
    """
    phi, psi = _ising_factors(params.beta)
    n = params.num_sites
    first = phi[:, None, :]
    bulk = np.einsum("ls,sm->slm", psi, phi)
    last = psi.T[:, :, None]
    tensors = [first] + [bulk] * (n - 2) + [last]
    return StochasticMPS(2, n, tuple(tensors)).normalize()


def ising_entropy_cost_exact(beta: float) -> float:
    """Correlation cost in bits across any interior cut of the spin chain.

    Equals the entropy of the normalized transfer-matrix eigenvalue pair
    ``(1 + exp(-2 beta))/2`` and ``(1 - exp(-2 beta))/2``; zero at beta = 0,
    approaching one bit as beta grows.
    """
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    e2 = math.exp(-2.0 * beta)
    p = np.array([(1.0 + e2) / 2.0, (1.0 - e2) / 2.0])
    return float(-xlogy(p, p).sum() / _LN2) + 0.0


@dataclass(frozen=True)
class AsepRepresentation:
    """One exact matrix-product form of the exclusion-chain steady state.

    ``empty_matrix`` and ``occupied_matrix`` are the site matrices (shape
    ``(m, m)`` with ``m = num_sites + 1``, or 1x1 for the scalar solution);
    ``left_vector`` and ``right_vector`` are the boundary contractions.  The
    2x2 corner blocks satisfy the quadratic algebra
    ``occupied @ empty + |1><1| = occupied + empty`` and the boundary vectors
    are eigenvectors of their adjacent corner blocks with eigenvalues
    ``1/alpha`` and ``1/beta``; both facts are re-verified on construction.
    """

    regime: str
    alpha: float
    beta: float
    num_sites: int
    coupling: float
    empty_matrix: np.ndarray
    occupied_matrix: np.ndarray
    left_vector: np.ndarray
    right_vector: np.ndarray

    def __post_init__(self):
        emp = np.asarray(self.empty_matrix, dtype=float)
        occ = np.asarray(self.occupied_matrix, dtype=float)
        w = np.asarray(self.left_vector, dtype=float)
        v = np.asarray(self.right_vector, dtype=float)
        for arr in (emp, occ, w, v):
            if np.any(arr < 0.0):
                raise StructureError("negative entry in steady-state representation")
        if emp.shape != occ.shape or w.shape != (emp.shape[0],) or v.shape != w.shape:
            raise StructureError("representation blocks have mismatched shapes")
        if emp.shape[0] == 1:
            resid = abs(occ[0, 0] * emp[0, 0] - occ[0, 0] - emp[0, 0])
        else:
            o2, e2 = occ[:2, :2], emp[:2, :2]
            kink = np.zeros((2, 2))
            kink[1, 1] = 1.0
            resid = np.abs(o2 @ e2 + kink - o2 - e2).max()
        if resid > _ALGEBRA_TOL:
            raise StructureError(f"quadratic algebra violated by {resid:.3e}")
        lres = np.abs(w @ emp - w / self.alpha).max()
        rres = np.abs(occ @ v - v / self.beta).max()
        if max(lres, rres) > _ALGEBRA_TOL:
            raise StructureError(
                f"boundary eigenvector relations violated by {max(lres, rres):.3e}"
            )

    @property
    def bond_dim(self) -> int:
        return self.empty_matrix.shape[0]

    def to_mps(self) -> StochasticMPS:
        """Contract boundary vectors into the site stacks and normalize."""
        site = np.stack([self.empty_matrix, self.occupied_matrix])
        mats = [site] * self.num_sites
        return StochasticMPS.from_site_matrices(
            mats, left=self.left_vector, right=self.right_vector
        ).normalize()


def _corner_blocks(alpha: float, beta: float, regime: str):
    """2x2 corner solution of the quadratic algebra for one regime label."""
    if regime == "I":
        if alpha + beta > 1.0 + MEAN_FIELD_TOL:
            raise ValueError("regime I requires alpha + beta <= 1")
        b = math.sqrt(max(1.0 - alpha - beta, 0.0))
        emp = np.array([[1.0 / (1.0 - beta), 0.0], [b, 1.0 / alpha]])
        occ = np.array([[1.0 / beta, 0.0], [0.0, 1.0]])
        w = np.array([alpha * (1.0 - beta), b])
        v = np.array([1.0, 0.0])
        return emp, occ, w, v, b
    if regime == "II":
        if alpha + beta > 1.0 + MEAN_FIELD_TOL:
            raise ValueError("regime II requires alpha + beta <= 1")
        b = math.sqrt(max(1.0 - alpha - beta, 0.0))
        emp = np.array([[1.0 / alpha, 0.0], [0.0, 1.0]])
        occ = np.array([[1.0 / (1.0 - alpha), b], [0.0, 1.0 / beta]])
        w = np.array([1.0, 0.0])
        v = np.array([beta * (1.0 - alpha), b])
        return emp, occ, w, v, b
    if regime == "III":
        if alpha + beta < 1.0 - MEAN_FIELD_TOL:
            raise ValueError("regime III requires alpha + beta >= 1")
        a = math.sqrt(max(1.0 / alpha + 1.0 / beta - 1.0 / (alpha * beta), 0.0))
        emp = np.array([[1.0 / alpha, 0.0], [a, 1.0]])
        occ = np.array([[1.0 / beta, a], [0.0, 1.0]])
        w = np.array([1.0, 0.0])
        v = np.array([1.0, 0.0])
        return emp, occ, w, v, a
    raise ValueError(f"unknown regime label {regime!r}")


def _embed_bulk(corner: np.ndarray, num_sites: int, lower: bool) -> np.ndarray:
    """Extend a 2x2 corner block to the (N+1)-dimensional site matrix.

    The bulk part is the identity on indices 2..N plus a shift coupling each
    index to its neighbor: below the diagonal for empty-site matrices, above
    it for occupied-site matrices.
    """
    m = num_sites + 1
    full = np.zeros((m, m))
    full[:2, :2] = corner
    for k in range(2, m):
        full[k, k] = 1.0
        if lower:
            full[k, k - 1] = 1.0
        else:
            full[k - 1, k] = 1.0
    return full


def _pad(vec: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m)
    out[: vec.size] = vec
    return out


def asep_representation_for_regime(
    params: AsepParams, regime: str
) -> AsepRepresentation:
    """Build one named representation; raise ValueError where it is invalid.

    ``regime`` is one of "I", "II" (valid for alpha + beta <= 1), "III"
    (alpha + beta >= 1), or "MF" (the scalar solution, only on the line
    alpha + beta = 1).
    """
    alpha, beta, n = params.alpha, params.beta, params.num_sites
    if regime == "MF":
        if abs(alpha + beta - 1.0) > MEAN_FIELD_TOL:
            raise ValueError("the scalar solution requires alpha + beta = 1")
        return AsepRepresentation(
            "MF",
            alpha,
            beta,
            n,
            0.0,
            np.array([[1.0 / alpha]]),
            np.array([[1.0 / beta]]),
            np.array([1.0]),
            np.array([1.0]),
        )
    emp2, occ2, w2, v2, coupling = _corner_blocks(alpha, beta, regime)
    m = n + 1
    return AsepRepresentation(
        regime,
        alpha,
        beta,
        n,
        coupling,
        _embed_bulk(emp2, n, lower=True),
        _embed_bulk(occ2, n, lower=False),
        _pad(w2, m),
        _pad(v2, m),
    )


def asep_representation(params: AsepParams) -> AsepRepresentation:
    """The minimal-entropy representation at (alpha, beta).

    On the line alpha + beta = 1 the scalar solution wins outright; below the
    line regime I wins for beta <= alpha and regime II otherwise; above the
    line regime III is the only finite solution.
    """
    s = params.alpha + params.beta
    if abs(s - 1.0) <= MEAN_FIELD_TOL:
        return asep_representation_for_regime(params, "MF")
    if s < 1.0:
        label = "I" if params.beta <= params.alpha else "II"
        return asep_representation_for_regime(params, label)
    return asep_representation_for_regime(params, "III")


def asep_candidate_representations(params: AsepParams):
    """All representations valid at (alpha, beta), as (label, form) pairs.

    The default representation's label comes first so that bracket ties
    resolve to it.
    """
    first = asep_representation(params)
    out = [(first.regime, first)]
    for label in ("MF", "I", "II", "III"):
        if label == first.regime:
            continue
        try:
            out.append((label, asep_representation_for_regime(params, label)))
        except ValueError:
            continue
    return out


def asep_mps(params: AsepParams) -> StochasticMPS:
    """Normalized steady-state stack from the minimal-entropy representation."""
    return asep_representation(params).to_mps()


def asep_scalar_mps(params: AsepParams) -> StochasticMPS:
    """Bond-dimension-1 product form, defined only on alpha + beta = 1."""
    return asep_representation_for_regime(params, "MF").to_mps()
