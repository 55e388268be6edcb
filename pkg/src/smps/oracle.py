"""Exact steady states of the open exclusion chain from its master equation.

Builds the full transition-rate matrix over all 2**N occupation patterns in
the column convention (d/dt p = Q p) and solves Q p = 0.  This is the
independent reference the matrix-product construction is validated against,
so it shares no code with the tensor modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .core import ProbabilityTable
from .errors import CapacityError, ConvergenceError, StructureError
from .models import AsepParams

MAX_ORACLE_SITES = 14
RESIDUAL_TOL = 1e-11
_DENSE_MAX_STATES = 2**10
_MAX_POWER_ITERS = 200_000

# Occupation patterns are bitmasks: site s occupies bit (N - s), so site 1 is
# the most significant bit, matching configuration indices elsewhere.


@dataclass(frozen=True)
class MarkovGenerator:
    """Sparse transition-rate matrix of the chain, column convention."""

    num_sites: int
    alpha: float
    beta: float
    matrix: sparse.csc_matrix = field(repr=False)

    def __post_init__(self):
        q = self.matrix
        if q.shape != (2**self.num_sites,) * 2:
            raise StructureError("generator shape does not match num_sites")
        colsums = np.asarray(q.sum(axis=0)).ravel()
        if np.abs(colsums).max() > 1e-12:
            raise StructureError("generator columns must sum to zero")
        coo = q.tocoo()
        offdiag = coo.data[coo.row != coo.col]
        if offdiag.size and offdiag.min() < 0.0:
            raise StructureError("negative off-diagonal rate")

    def residual(self, table: ProbabilityTable) -> float:
        """Max-norm of Q p for a candidate steady state."""
        return float(np.abs(self.matrix @ table.weights).max())


def asep_generator(params: AsepParams) -> MarkovGenerator:
    """Rate matrix for injection at site 1, unit right hops, extraction at N."""
    n = params.num_sites
    if n > MAX_ORACLE_SITES:
        raise CapacityError(
            f"generator over {n} sites exceeds the {MAX_ORACLE_SITES}-site guard"
        )
    size = 1 << n
    states = np.arange(size, dtype=np.int64)
    rows, cols, vals = [], [], []

    msb = np.int64(1 << (n - 1))
    src = states[(states & msb) == 0]
    rows.append(src | msb)
    cols.append(src)
    vals.append(np.full(src.size, params.alpha))

    for j in range(n - 1, 0, -1):
        hi = np.int64(1 << j)
        lo = np.int64(1 << (j - 1))
        src = states[((states & hi) != 0) & ((states & lo) == 0)]
        rows.append((src ^ hi) | lo)
        cols.append(src)
        vals.append(np.ones(src.size))

    src = states[(states & 1) == 1]
    rows.append(src ^ np.int64(1))
    cols.append(src)
    vals.append(np.full(src.size, params.beta))

    q = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).tocsc()
    q = (q - sparse.diags(np.asarray(q.sum(axis=0)).ravel())).tocsc()
    return MarkovGenerator(n, params.alpha, params.beta, q)


def _dense_steady_state(q: np.ndarray) -> np.ndarray:
    """Solve Q p = 0, sum(p) = 1 by replacing one row; SVD null space fallback."""
    size = q.shape[0]
    m = q.copy()
    m[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    try:
        p = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError:
        p = None
    if p is None or p.min() < -1e-9 or np.abs(q @ p).max() > RESIDUAL_TOL:
        _, _, vt = np.linalg.svd(q)
        p = vt[-1]
        p = p / p.sum()
    return p


def _iterative_steady_state(q: sparse.csc_matrix) -> np.ndarray:
    """Power iteration on the uniformized chain I + Q / rate."""
    size = q.shape[0]
    rate = 1.01 * float(-q.diagonal().min())
    step = (sparse.eye(size, format="csr") + q.tocsr() / rate).tocsr()
    p = np.full(size, 1.0 / size)
    resid = np.inf
    for it in range(_MAX_POWER_ITERS):
        p = step @ p
        np.clip(p, 0.0, None, out=p)
        p /= p.sum()
        if it % 100 == 99:
            resid = float(np.abs(q @ p).max())
            if resid <= RESIDUAL_TOL:
                return p
    raise ConvergenceError(
        f"power iteration stalled at residual {resid:.3e} "
        f"after {_MAX_POWER_ITERS} steps"
    )


def steady_state(gen: MarkovGenerator) -> ProbabilityTable:
    """Unique stationary distribution of the generator.

    Dense solve up to 2**10 states, uniformized power iteration beyond; the
    result is certified to satisfy max|Q p| <= 1e-11.
    """
    size = gen.matrix.shape[0]
    if size <= _DENSE_MAX_STATES:
        p = _dense_steady_state(gen.matrix.toarray())
    else:
        p = _iterative_steady_state(gen.matrix)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    resid = float(np.abs(gen.matrix @ p).max())
    if resid > RESIDUAL_TOL:
        raise ConvergenceError(f"steady-state residual {resid:.3e} exceeds 1e-11")
    return ProbabilityTable(2, gen.num_sites, p, normalized=True)


def steady_state_table(params: AsepParams) -> ProbabilityTable:
    """Convenience wrapper: generator construction plus steady-state solve."""
    return steady_state(asep_generator(params))
