"""Cut spectra, channel decompositions, and the bond-probability normal form.

The transfer matrix of a site is its physical sum.  Accumulating transfer
products from the left and right yields, at every bond, a pair of nonnegative
environment vectors whose elementwise product is a probability vector over
bond indices: the cut spectrum.  Regauging the site tensors against those
environments produces a normal form in which every bond carries its spectrum
explicitly as a diagonal of probabilities and truncation becomes a matter of
dropping the smallest entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    MPS_NORM_TOL,
    StochasticMPS,
    _frozen_array,
    factorize_at_cut,
)
from .errors import DegenerateInputError, NotNormalizedError, StructureError


def transfer_matrix(mps: StochasticMPS, site: int) -> np.ndarray:
    """Physical sum of one site tensor, shape ``(D_k, D_{k+1})`` (1-based site)."""
    if not 1 <= site <= mps.num_sites:
        raise ValueError(f"site must lie in 1..{mps.num_sites}")
    return mps.tensors[site - 1].sum(axis=0)


def _left_environments(mps: StochasticMPS):
    """``envs[k]`` is the product of the first k transfer matrices (row vector)."""
    envs = [np.ones(1)]
    for t in mps.tensors:
        envs.append(envs[-1] @ t.sum(axis=0))
    return envs


def _right_environments(mps: StochasticMPS):
    """``envs[k]`` is the product of transfer matrices after site k (column vector)."""
    envs = [np.ones(1)] * (mps.num_sites + 1)
    for k in range(mps.num_sites - 1, -1, -1):
        envs[k] = mps.tensors[k].sum(axis=0) @ envs[k + 1]
    return envs


@dataclass(frozen=True)
class CutSpectrum:
    """Probabilities carried by the bond indices at one cut, sorted descending.

    ``bond_dim`` records the bond dimension the spectrum came from; the
    probability vector may be shorter when exact zeros were pruned.
    """

    cut: int
    probabilities: np.ndarray
    bond_dim: int

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise StructureError("spectrum must be a nonempty vector")
        if np.any(p < 0.0):
            raise StructureError("negative spectrum entry")
        if np.any(np.diff(p) > 0.0):
            raise StructureError("spectrum must be sorted in descending order")
        if abs(p.sum() - 1.0) > MPS_NORM_TOL:
            raise StructureError(f"spectrum sums to {p.sum()!r}, expected 1")
        object.__setattr__(self, "probabilities", _frozen_array(p))

    def __len__(self):
        return self.probabilities.size


def cut_spectrum(mps: StochasticMPS, cut: int) -> CutSpectrum:
    """Spectrum of a normalized MPS at one cut, zeros included.

    The entries are products of the left and right environment vectors at the
    bond; they are specific to the given tensor stack, not to the distribution
    it represents, but any regauging that preserves the environments (such as
    the normal form below) leaves them unchanged.
    """
    if not mps.normalized:
        raise NotNormalizedError("cut_spectrum requires a normalized MPS")
    if not 1 <= cut <= mps.num_sites - 1:
        raise ValueError(f"cut must lie in 1..{mps.num_sites - 1}")
    left = np.ones(1)
    for t in mps.tensors[:cut]:
        left = left @ t.sum(axis=0)
    right = np.ones(1)
    for t in reversed(mps.tensors[cut:]):
        right = t.sum(axis=0) @ right
    p = left * right
    order = np.argsort(-p, kind="stable")
    return CutSpectrum(cut, p[order], bond_dim=p.size)


@dataclass(frozen=True)
class ChannelPair:
    """Decomposition of a bipartite distribution through a latent bond index.

    Columns of ``left_conditionals`` (one per surviving bond index) are
    conditional distributions over left-block configurations, likewise
    ``right_conditionals`` for the right block.  Mixing the product columns
    with the spectrum weights reproduces the joint table, exhibiting the bond
    index as a common source for the two halves.
    """

    cut: int
    spectrum: CutSpectrum
    left_conditionals: np.ndarray = field(repr=False)
    right_conditionals: np.ndarray = field(repr=False)

    def __post_init__(self):
        lc = np.asarray(self.left_conditionals, dtype=float)
        rc = np.asarray(self.right_conditionals, dtype=float)
        m = len(self.spectrum)
        if lc.ndim != 2 or rc.ndim != 2 or lc.shape[1] != m or rc.shape[1] != m:
            raise StructureError("conditional blocks do not match spectrum size")
        if np.any(lc < 0.0) or np.any(rc < 0.0):
            raise StructureError("negative conditional probability")
        for name, block in (("left", lc), ("right", rc)):
            colsums = block.sum(axis=0)
            if np.any(np.abs(colsums - 1.0) > MPS_NORM_TOL):
                raise StructureError(f"{name} conditionals are not column-stochastic")
        object.__setattr__(self, "left_conditionals", _frozen_array(lc))
        object.__setattr__(self, "right_conditionals", _frozen_array(rc))

    def joint_weights(self) -> np.ndarray:
        """Joint table as a (left configs, right configs) matrix."""
        p = self.spectrum.probabilities
        return (self.left_conditionals * p) @ self.right_conditionals.T


def channel_decomposition(mps: StochasticMPS, cut: int) -> ChannelPair:
    """Split a normalized MPS at ``cut`` into spectrum-weighted conditionals.

    Bond indices whose spectrum weight is exactly zero carry no mass and are
    pruned; the surviving columns are normalized by the environment weights so
    each is a genuine conditional distribution.
    """
    if not mps.normalized:
        raise NotNormalizedError("channel_decomposition requires a normalized MPS")
    f = factorize_at_cut(mps, cut)
    lsum = f.left_vectors.sum(axis=0)
    rsum = f.right_vectors.sum(axis=0)
    p = lsum * rsum
    keep = np.flatnonzero(p > 0.0)
    if keep.size == 0:
        raise DegenerateInputError("all bond indices carry zero mass")
    order = keep[np.argsort(-p[keep], kind="stable")]
    left = f.left_vectors[:, order] / lsum[order]
    right = f.right_vectors[:, order] / rsum[order]
    spectrum = CutSpectrum(cut, p[order], bond_dim=p.size)
    return ChannelPair(cut, spectrum, left, right)


@dataclass(frozen=True)
class NaturalForm:
    """Normal form: nonnegative site tensors interleaved with bond probabilities.

    ``bond_probabilities[k-1]`` is the pruned, descending spectrum at bond k.
    Folding each probability vector into the site tensor on its left recovers
    an equivalent MPS; the gauge fixes every left environment to the all-ones
    row and every right environment to the all-ones column, so the invariant
    "columns of (bond probabilities) x (next transfer matrix) sum to 1" holds
    at every bond.
    """

    local_dim: int
    num_sites: int
    site_tensors: tuple = field(repr=False)
    bond_probabilities: tuple = field(repr=False)

    def __post_init__(self):
        ts = tuple(np.asarray(t, dtype=float) for t in self.site_tensors)
        ps = tuple(np.asarray(p, dtype=float) for p in self.bond_probabilities)
        if len(ts) != self.num_sites or len(ps) != self.num_sites - 1:
            raise StructureError("tensor/bond counts do not match num_sites")
        for k, t in enumerate(ts):
            if t.ndim != 3 or t.shape[0] != self.local_dim or np.any(t < 0.0):
                raise StructureError(f"site {k + 1}: invalid normal-form tensor")
        for k, p in enumerate(ps):
            if p.ndim != 1 or np.any(p <= 0.0) or np.any(np.diff(p) > 0.0):
                raise StructureError(f"bond {k + 1}: invalid probability vector")
            if abs(p.sum() - 1.0) > MPS_NORM_TOL:
                raise StructureError(f"bond {k + 1}: probabilities sum to {p.sum()!r}")
            if ts[k].shape[2] != p.size or ts[k + 1].shape[1] != p.size:
                raise StructureError(f"bond {k + 1}: size mismatch with site tensors")
        object.__setattr__(self, "site_tensors", tuple(_frozen_array(t) for t in ts))
        object.__setattr__(self, "bond_probabilities", tuple(_frozen_array(p) for p in ps))

    @property
    def bond_dims(self) -> tuple:
        dims = [1]
        dims.extend(t.shape[2] for t in self.site_tensors)
        return tuple(dims)

    @property
    def max_bond_dim(self) -> int:
        return max(self.bond_dims)

    def spectrum(self, cut: int) -> CutSpectrum:
        """Spectrum at a cut, read off the stored bond probabilities."""
        if not 1 <= cut <= self.num_sites - 1:
            raise ValueError(f"cut must lie in 1..{self.num_sites - 1}")
        p = self.bond_probabilities[cut - 1]
        return CutSpectrum(cut, p, bond_dim=p.size)

    def to_mps(self) -> StochasticMPS:
        """Fold bond probabilities into site tensors and return a plain MPS."""
        ts = []
        for k, t in enumerate(self.site_tensors):
            if k < self.num_sites - 1:
                ts.append(t * self.bond_probabilities[k])
            else:
                ts.append(np.array(t))
        return StochasticMPS(self.local_dim, self.num_sites, tuple(ts), normalized=True)


def to_natural_form(mps: StochasticMPS) -> NaturalForm:
    """Regauge a normalized MPS so every bond carries its spectrum explicitly.

    Each site tensor is divided by the right environment on its incoming bond
    and the left environment on its outgoing bond; bond indices with a zero
    environment factor carry no mass and are pruned, and the survivors are
    sorted by descending spectrum weight.  The represented distribution and
    all cut spectra are unchanged.
    """
    if not mps.normalized:
        raise NotNormalizedError("to_natural_form requires a normalized MPS")
    n = mps.num_sites
    lenv = _left_environments(mps)
    renv = _right_environments(mps)
    # per-bond survivor lists, ordered by descending weight
    orders = [np.zeros(1, dtype=int)]
    probs = []
    for k in range(1, n):
        p = lenv[k] * renv[k]
        keep = np.flatnonzero((lenv[k] > 0.0) & (renv[k] > 0.0) & (p > 0.0))
        if keep.size == 0:
            raise DegenerateInputError(f"bond {k}: all indices carry zero mass")
        order = keep[np.argsort(-p[keep], kind="stable")]
        orders.append(order)
        probs.append(p[order])
    orders.append(np.zeros(1, dtype=int))

    tensors = []
    for k in range(1, n + 1):
        rows = orders[k - 1]
        cols = orders[k]
        t = mps.tensors[k - 1][:, rows[:, None], cols[None, :]]
        rin = renv[k - 1][rows] if k > 1 else np.array([renv[0][0]])
        lout = lenv[k][cols] if k < n else np.array([lenv[n][0]])
        tensors.append(t / (rin[None, :, None] * lout[None, None, :]))
    return NaturalForm(mps.local_dim, n, tuple(tensors), tuple(probs))


def truncate(nf: NaturalForm, bond_cap: int):
    """Keep at most ``bond_cap`` spectrum entries per bond and renormalize.

    Returns ``(mps, error_bound, tail_masses)`` where ``tail_masses[k-1]`` is
    the spectrum weight discarded at bond k and ``error_bound`` is twice their
    sum, a certified upper bound on the L1 distance between the original and
    the truncated distribution.
    """
    if bond_cap < 1:
        raise ValueError("bond_cap must be at least 1")
    n = nf.num_sites
    tails = [float(p[bond_cap:].sum()) for p in nf.bond_probabilities]
    error_bound = 2.0 * float(sum(tails))
    tensors = []
    for k, t in enumerate(nf.site_tensors):
        rows = slice(0, bond_cap) if k > 0 else slice(None)
        cols = slice(0, bond_cap) if k < n - 1 else slice(None)
        tt = np.array(t[:, rows, cols])
        if k < n - 1:
            tt *= nf.bond_probabilities[k][:bond_cap]
        tensors.append(tt)
    raw = StochasticMPS(nf.local_dim, n, tuple(tensors), normalized=False)
    if raw.total_mass() <= 0.0:
        # possible only when the discarded tails already exceed the total
        # mass, i.e. when the certificate is vacuous (error_bound >= 2)
        raise DegenerateInputError(
            f"bond cap {bond_cap} disconnects the chain; no mass survives"
        )
    return raw.normalize(), error_bound, tails
