"""Dense probability tables and their tensor-train compressions.

A distribution over configurations of ``num_sites`` variables, each taking
``local_dim`` values, is represented either explicitly (:class:`ProbabilityTable`)
or as a stack of elementwise-nonnegative site tensors whose chained product,
summed over physical indices, yields the weight of every configuration
(:class:`StochasticMPS`).  Site 1 is the most significant digit of the flat
configuration index throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, NotNormalizedError, StructureError

# Dense tables are refused beyond this many cells.
MAX_TABLE_CELLS = 2**26
# Half-chain tabulations (one row per left or right block configuration)
# are refused beyond this many rows.
MAX_BLOCK_ROWS = 2**22

TABLE_NORM_TOL = 1e-12
MPS_NORM_TOL = 1e-10


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def config_index(config, local_dim: int) -> int:
    """Flat index of a configuration tuple; site 1 is the leading digit."""
    idx = 0
    for c in config:
        if not 0 <= c < local_dim:
            raise ValueError(f"symbol {c} outside alphabet of size {local_dim}")
        idx = idx * local_dim + int(c)
    return idx


def index_config(index: int, local_dim: int, num_sites: int) -> tuple:
    """Inverse of :func:`config_index`."""
    out = []
    for _ in range(num_sites):
        out.append(index % local_dim)
        index //= local_dim
    return tuple(reversed(out))


@dataclass(frozen=True)
class ProbabilityTable:
    """Explicit nonnegative weights over all ``local_dim**num_sites`` configurations.

    ``normalized`` certifies that the weights sum to 1 within ``TABLE_NORM_TOL``;
    constructing with a false certificate raises.
    """

    local_dim: int
    num_sites: int
    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        if self.local_dim < 2:
            raise StructureError("local_dim must be at least 2")
        if self.num_sites < 1:
            raise StructureError("num_sites must be at least 1")
        cells = self.local_dim**self.num_sites
        if cells > MAX_TABLE_CELLS:
            raise CapacityError(
                f"table would hold {cells} cells; guard is {MAX_TABLE_CELLS}"
            )
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (cells,):
            raise StructureError(f"expected {cells} weights, got shape {w.shape}")
        if np.any(w < 0.0):
            raise StructureError("negative weight in probability table")
        if self.normalized and abs(w.sum() - 1.0) > TABLE_NORM_TOL:
            raise StructureError(
                f"normalized flag set but weights sum to {w.sum()!r}"
            )
        object.__setattr__(self, "weights", _frozen_array(w))

    def total_mass(self) -> float:
        return float(self.weights.sum())

    def normalize(self) -> "ProbabilityTable":
        total = self.total_mass()
        if total <= 0.0:
            raise StructureError("cannot normalize a table with zero total mass")
        return ProbabilityTable(
            self.local_dim, self.num_sites, self.weights / total, normalized=True
        )

    def as_grid(self) -> np.ndarray:
        """Weights reshaped to one axis per site."""
        return self.weights.reshape((self.local_dim,) * self.num_sites)


@dataclass(frozen=True)
class StochasticMPS:
    """Tensor-train factorization with nonnegative entries.

    ``tensors[k]`` has shape ``(local_dim, D_k, D_{k+1})`` with ``D_0 = D_N = 1``;
    boundary vectors are already absorbed into the first and last site.  The
    weight of a configuration is the chained matrix product of the selected
    slices.  ``normalized`` certifies total mass 1 within ``MPS_NORM_TOL``.
    """

    local_dim: int
    num_sites: int
    tensors: tuple = field(repr=False)
    normalized: bool = False

    def __post_init__(self):
        if self.local_dim < 2:
            raise StructureError("local_dim must be at least 2")
        if self.num_sites < 1:
            raise StructureError("num_sites must be at least 1")
        ts = tuple(np.asarray(t, dtype=float) for t in self.tensors)
        if len(ts) != self.num_sites:
            raise StructureError(
                f"expected {self.num_sites} site tensors, got {len(ts)}"
            )
        for k, t in enumerate(ts):
            if t.ndim != 3 or t.shape[0] != self.local_dim:
                raise StructureError(
                    f"site {k + 1}: expected shape (local_dim, D, D'), got {t.shape}"
                )
            if np.any(t < 0.0):
                raise StructureError(f"site {k + 1}: negative tensor entry")
        if ts[0].shape[1] != 1 or ts[-1].shape[2] != 1:
            raise StructureError("outer bond dimensions must be 1")
        for k in range(self.num_sites - 1):
            if ts[k].shape[2] != ts[k + 1].shape[1]:
                raise StructureError(
                    f"bond mismatch between sites {k + 1} and {k + 2}: "
                    f"{ts[k].shape[2]} vs {ts[k + 1].shape[1]}"
                )
        object.__setattr__(self, "tensors", tuple(_frozen_array(t) for t in ts))
        if self.normalized and abs(self.total_mass() - 1.0) > MPS_NORM_TOL:
            raise StructureError(
                f"normalized flag set but total mass is {self.total_mass()!r}"
            )

    @classmethod
    def from_site_matrices(cls, matrices, left=None, right=None, normalized=False):
        """Build from per-site stacks, absorbing optional boundary vectors.

        ``left`` (length ``D_1``) multiplies the first stack from the left,
        ``right`` (length ``D_N``) the last stack from the right.
        """
        ts = [np.asarray(m, dtype=float) for m in matrices]
        if left is not None:
            lv = np.asarray(left, dtype=float)
            ts[0] = np.einsum("m,imn->in", lv, ts[0])[:, None, :]
        if right is not None:
            rv = np.asarray(right, dtype=float)
            ts[-1] = np.einsum("imn,n->im", ts[-1], rv)[:, :, None]
        d = ts[0].shape[0]
        return cls(d, len(ts), tuple(ts), normalized=normalized)

    @property
    def bond_dims(self) -> tuple:
        dims = [1]
        dims.extend(t.shape[2] for t in self.tensors)
        return tuple(dims)

    def total_mass(self) -> float:
        v = np.ones(1)
        for t in self.tensors:
            v = v @ t.sum(axis=0)
        return float(v[0])

    def normalize(self) -> "StochasticMPS":
        """Rescale every site uniformly so the total mass becomes 1.

        Accumulates the mass in log scale, so chains whose raw contraction
        would overflow or underflow a double still normalize.
        """
        log_total = 0.0
        v = np.ones(1)
        for t in self.tensors:
            v = v @ t.sum(axis=0)
            peak = v.max()
            if peak <= 0.0:
                raise StructureError("total mass is zero; cannot normalize")
            v = v / peak
            log_total += math.log(peak)
        log_total += math.log(v[0])
        factor = math.exp(-log_total / self.num_sites)
        return StochasticMPS(
            self.local_dim,
            self.num_sites,
            tuple(t * factor for t in self.tensors),
            normalized=True,
        )

    def weight(self, config) -> float:
        """Weight of a single configuration (tuple of symbols, site 1 first)."""
        if len(config) != self.num_sites:
            raise ValueError("configuration length does not match num_sites")
        v = np.ones(1)
        for t, c in zip(self.tensors, config):
            v = v @ t[int(c)]
        return float(v[0])


@dataclass(frozen=True)
class BipartiteFactorization:
    """Half-chain tabulation of an MPS across one cut.

    Row ``x`` of ``left_vectors`` is the product of the first ``cut`` site
    matrices for left-block configuration ``x``; row ``y`` of ``right_vectors``
    is the product of the remaining matrices for right-block configuration
    ``y``.  The joint weight of ``(x, y)`` is their dot product, so the pair
    encodes the full table without materializing it.
    """

    local_dim: int
    num_sites: int
    cut: int
    left_vectors: np.ndarray = field(repr=False)
    right_vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 1 <= self.cut <= self.num_sites - 1:
            raise ValueError(f"cut must lie in 1..{self.num_sites - 1}")
        lv = np.asarray(self.left_vectors, dtype=float)
        rv = np.asarray(self.right_vectors, dtype=float)
        if lv.ndim != 2 or rv.ndim != 2 or lv.shape[1] != rv.shape[1]:
            raise StructureError("left/right vector blocks do not share a bond")
        if lv.shape[0] != self.local_dim**self.cut:
            raise StructureError("left block row count does not match cut")
        if rv.shape[0] != self.local_dim ** (self.num_sites - self.cut):
            raise StructureError("right block row count does not match cut")
        if np.any(lv < 0.0) or np.any(rv < 0.0):
            raise StructureError("negative entry in half-chain vectors")
        object.__setattr__(self, "left_vectors", _frozen_array(lv))
        object.__setattr__(self, "right_vectors", _frozen_array(rv))

    @property
    def bond_dim(self) -> int:
        return self.left_vectors.shape[1]

    def total_mass(self) -> float:
        return float(self.left_vectors.sum(axis=0) @ self.right_vectors.sum(axis=0))

    def left_marginal(self) -> np.ndarray:
        """Weights of the left block, right block summed out."""
        return self.left_vectors @ self.right_vectors.sum(axis=0)

    def right_marginal(self) -> np.ndarray:
        return self.right_vectors @ self.left_vectors.sum(axis=0)

    def weight(self, x: int, y: int) -> float:
        return float(self.left_vectors[x] @ self.right_vectors[y])

    def joint_table(self) -> ProbabilityTable:
        """Materialize the full table (guarded by ``MAX_TABLE_CELLS``)."""
        cells = self.local_dim**self.num_sites
        if cells > MAX_TABLE_CELLS:
            raise CapacityError(
                f"table would hold {cells} cells; guard is {MAX_TABLE_CELLS}"
            )
        w = (self.left_vectors @ self.right_vectors.T).ravel()
        total = w.sum()
        return ProbabilityTable(
            self.local_dim,
            self.num_sites,
            w,
            normalized=bool(abs(total - 1.0) <= MPS_NORM_TOL),
        )


def factorize_at_cut(mps: StochasticMPS, cut: int) -> BipartiteFactorization:
    """Tabulate both half-chains of ``mps`` across ``cut``.

    Both blocks must fit under ``MAX_BLOCK_ROWS`` rows.  All intermediate
    vectors are products of nonnegative factors, hence nonnegative.
    """
    n = mps.num_sites
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must lie in 1..{n - 1}")
    left_rows = mps.local_dim**cut
    right_rows = mps.local_dim ** (n - cut)
    if max(left_rows, right_rows) > MAX_BLOCK_ROWS:
        raise CapacityError(
            f"half-chain tabulation needs {max(left_rows, right_rows)} rows; "
            f"guard is {MAX_BLOCK_ROWS}"
        )
    left = np.ones((1, 1))
    for t in mps.tensors[:cut]:
        left = np.einsum("xm,imn->xin", left, t).reshape(-1, t.shape[2])
    right = np.ones((1, 1))
    for t in reversed(mps.tensors[cut:]):
        # prepend site t: new row index is (symbol, old rows)
        right = np.einsum("imn,yn->iym", t, right).reshape(-1, t.shape[1])
    return BipartiteFactorization(mps.local_dim, n, cut, left, right)


def contract_to_table(mps: StochasticMPS) -> ProbabilityTable:
    """Expand an MPS into its explicit table (guarded by ``MAX_TABLE_CELLS``).

    The result carries ``normalized=True`` exactly when the contraction sums
    to 1 within ``MPS_NORM_TOL``.
    """
    cells = mps.local_dim**mps.num_sites
    if cells > MAX_TABLE_CELLS:
        raise CapacityError(
            f"table would hold {cells} cells; guard is {MAX_TABLE_CELLS}"
        )
    if mps.num_sites == 1:
        w = mps.tensors[0][:, 0, 0].copy()
    else:
        f = factorize_at_cut(mps, mps.num_sites // 2)
        w = (f.left_vectors @ f.right_vectors.T).ravel()
    total = w.sum()
    return ProbabilityTable(
        mps.local_dim,
        mps.num_sites,
        w,
        normalized=bool(abs(total - 1.0) <= MPS_NORM_TOL),
    )


def marginal(table: ProbabilityTable, sites) -> ProbabilityTable:
    """Marginal of a normalized table on a nonempty subset of sites (1-based).

    Kept sites stay in chain order regardless of the order they are given in.
    """
    keep = sorted(set(int(s) for s in sites))
    if not keep:
        raise ValueError("site subset must be nonempty")
    if keep[0] < 1 or keep[-1] > table.num_sites:
        raise ValueError(f"sites must lie in 1..{table.num_sites}")
    if not table.normalized:
        raise NotNormalizedError("marginal requires a normalized table")
    drop = tuple(ax for ax in range(table.num_sites) if (ax + 1) not in keep)
    w = table.as_grid().sum(axis=drop).ravel()
    return ProbabilityTable(table.local_dim, len(keep), w, normalized=True)


def l1_distance(a: ProbabilityTable, b: ProbabilityTable) -> float:
    """Sum of absolute weight differences between two same-shape tables."""
    if (a.local_dim, a.num_sites) != (b.local_dim, b.num_sites):
        raise StructureError("tables have different shapes")
    return float(np.abs(a.weights - b.weights).sum())
