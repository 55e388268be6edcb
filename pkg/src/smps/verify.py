"""Bound and identity checks over model and randomized instances.

Each check returns the worst observed violation together with the bound it
must stay under; the ``smps verify`` subcommand prints one line per check.
The random-instance generator is exported for reuse by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .canonical import cut_spectrum, channel_decomposition, to_natural_form, truncate
from .core import StochasticMPS, contract_to_table, factorize_at_cut, l1_distance
from .infotheory import mutual_information, pinsker_gap, shannon_entropy
from .models import AsepParams, asep_candidate_representations, asep_mps
from .oracle import steady_state_table


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    bound: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<34} worst={self.worst: .3e}  bound={self.bound:.1e}  {status}"


def _result(name: str, worst: float, bound: float) -> CheckResult:
    return CheckResult(name, float(worst), float(bound), bool(worst <= bound))


def random_smps(
    rng,
    num_sites: int | None = None,
    *,
    min_sites: int = 2,
    max_sites: int = 6,
    local_dim: int = 2,
    max_bond: int = 4,
    zero_fraction: float = 0.0,
) -> StochasticMPS:
    """Random normalized stack with uniform entries and optional hard zeros.

    ``zero_fraction`` of the entries are forced to exactly zero, which
    exercises pruning paths; degenerate draws with vanishing total mass are
    rejected and redrawn.
    """
    n = int(num_sites) if num_sites is not None else int(rng.integers(min_sites, max_sites + 1))
    for _ in range(100):
        dims = [1] + [int(rng.integers(1, max_bond + 1)) for _ in range(n - 1)] + [1]
        tensors = []
        for k in range(n):
            t = rng.random((local_dim, dims[k], dims[k + 1]))
            if zero_fraction > 0.0:
                t[rng.random(t.shape) < zero_fraction] = 0.0
            tensors.append(t)
        raw = StochasticMPS(local_dim, n, tuple(tensors))
        if raw.total_mass() > 1e-9:
            return raw.normalize()
    raise RuntimeError("failed to draw a stack with positive mass")


def _rate_grid(step: float):
    vals = np.arange(step, 1.0, step)
    return [round(float(v), 12) for v in vals]


def check_quadratic_algebra(step: float = 0.1) -> CheckResult:
    """Algebra and boundary relations of every representation on a rate grid."""
    worst = 0.0
    for a in _rate_grid(step):
        for b in _rate_grid(step):
            for _, rep in asep_candidate_representations(AsepParams(a, b, 3)):
                occ2 = rep.occupied_matrix[:2, :2]
                emp2 = rep.empty_matrix[:2, :2]
                if rep.bond_dim == 1:
                    resid = abs(occ2[0, 0] * emp2[0, 0] - occ2[0, 0] - emp2[0, 0])
                else:
                    kink = np.zeros((2, 2))
                    kink[1, 1] = 1.0
                    resid = float(np.abs(occ2 @ emp2 + kink - occ2 - emp2).max())
                lres = float(np.abs(rep.left_vector @ rep.empty_matrix - rep.left_vector / a).max())
                rres = float(np.abs(rep.occupied_matrix @ rep.right_vector - rep.right_vector / b).max())
                worst = max(worst, resid, lres, rres)
    return _result("quadratic-algebra", worst, 1e-12)


def check_oracle_equivalence(
    max_sites: int = 6, step: float = 0.2, mps_builder=asep_mps
) -> CheckResult:
    """L1 distance between contracted stacks and master-equation solutions."""
    worst = 0.0
    for n in range(1, max_sites + 1):
        for a in _rate_grid(step):
            for b in _rate_grid(step):
                params = AsepParams(a, b, n)
                dist = l1_distance(
                    contract_to_table(mps_builder(params)), steady_state_table(params)
                )
                worst = max(worst, dist)
    return _result("oracle-equivalence", worst, 1e-9)


def check_mean_field_line(num_sites: int = 20, points: int = 9) -> CheckResult:
    """Zero mutual information and zero-entropy spectra on alpha + beta = 1."""
    worst = 0.0
    for a in np.linspace(0.1, 0.9, points):
        params = AsepParams(round(float(a), 12), round(float(1.0 - a), 12), num_sites)
        mps = asep_mps(params)
        mi = mutual_information(factorize_at_cut(mps, num_sites // 2))
        ub = min(
            shannon_entropy(cut_spectrum(rep.to_mps(), num_sites // 2).probabilities, check=False)
            for _, rep in asep_candidate_representations(params)
        )
        worst = max(worst, mi, ub)
    return _result("mean-field-line", worst, 1e-10)


def check_spectrum_support(num_sites: int = 20) -> CheckResult:
    """At most 11 nonzero spectrum values at the middle cut, any rates."""
    worst = 0.0
    for a in (0.2, 0.4, 0.7):
        for b in (0.2, 0.4, 0.7):
            spectrum = cut_spectrum(asep_mps(AsepParams(a, b, num_sites)), num_sites // 2)
            worst = max(worst, float(spectrum.probabilities[11:].max()))
    return _result("spectrum-support", worst, 1e-12)


def check_spectrum_decay(num_sites: int = 20) -> CheckResult:
    """Strictly decreasing spectrum over its support at the middle cut."""
    worst = -math.inf
    for a in (0.2, 0.4, 0.7):
        for b in (0.2, 0.4, 0.7):
            spectrum = cut_spectrum(asep_mps(AsepParams(a, b, num_sites)), num_sites // 2)
            live = spectrum.probabilities[spectrum.probabilities > 1e-12]
            worst = max(worst, float(np.diff(live).max()))
    # gaps must be strictly positive: the worst (largest) difference stays negative
    return _result("spectrum-decay", worst, -1e-15)


def check_entropy_log_bound(step: float = 0.2, site_counts=(3, 6, 10, 20)) -> CheckResult:
    """Spectrum entropy of every representation at most log2(N + 1)."""
    worst = -math.inf
    for n in site_counts:
        cap = math.log2(n + 1)
        for a in _rate_grid(step):
            for b in _rate_grid(step):
                for _, rep in asep_candidate_representations(AsepParams(a, b, n)):
                    mps = rep.to_mps()
                    for cut in range(1, n):
                        h = shannon_entropy(
                            cut_spectrum(mps, cut).probabilities, check=False
                        )
                        worst = max(worst, h - cap)
    return _result("entropy-log-bound", worst, 0.0)


def check_mi_spectrum_bound(trials: int = 200, seed: int = 20260814) -> CheckResult:
    """Mutual information never exceeds the spectrum entropy at any cut."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for trial in range(trials):
        mps = random_smps(rng, zero_fraction=0.2 if trial % 3 == 0 else 0.0)
        for cut in range(1, mps.num_sites):
            mi = mutual_information(factorize_at_cut(mps, cut))
            h = shannon_entropy(cut_spectrum(mps, cut).probabilities, check=False)
            worst = max(worst, mi - h)
    return _result("mi-spectrum-bound", worst, 1e-9)


def check_truncation_bound(trials: int = 100, seed: int = 20260814) -> CheckResult:
    """Measured truncation error never exceeds twice the discarded mass."""
    rng = np.random.default_rng(seed + 1)
    worst = -math.inf
    for trial in range(trials):
        mps = random_smps(rng, zero_fraction=0.15 if trial % 4 == 0 else 0.0)
        table = contract_to_table(mps)
        nf = to_natural_form(mps)
        for cap in range(1, nf.max_bond_dim + 1):
            truncated, bound, _ = truncate(nf, cap)
            worst = max(worst, l1_distance(table, contract_to_table(truncated)) - bound)
    return _result("truncation-bound", worst, 1e-9)


def check_pinsker(trials: int = 200, seed: int = 20260814) -> CheckResult:
    """Squared distance to the marginal product stays under 2 ln 2 times MI."""
    rng = np.random.default_rng(seed + 2)
    worst = -math.inf
    for _ in range(trials):
        mps = random_smps(rng)
        for cut in range(1, mps.num_sites):
            lhs, rhs = pinsker_gap(factorize_at_cut(mps, cut))
            worst = max(worst, lhs - rhs)
    return _result("pinsker-gap", worst, 1e-9)


def check_natural_form(trials: int = 200, seed: int = 20260814) -> CheckResult:
    """Reconstruction, column stochasticity, and spectrum preservation."""
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for trial in range(trials):
        mps = random_smps(rng, zero_fraction=0.2 if trial % 3 == 0 else 0.0)
        nf = to_natural_form(mps)
        back = nf.to_mps()
        worst = max(worst, l1_distance(contract_to_table(mps), contract_to_table(back)))
        prev = np.ones(1)
        for k, t in enumerate(nf.site_tensors):
            cols = (prev[:, None] * t.sum(axis=0)).sum(axis=0)
            worst = max(worst, float(np.abs(cols - 1.0).max()))
            if k < nf.num_sites - 1:
                prev = nf.bond_probabilities[k]
        for cut in range(1, mps.num_sites):
            orig = cut_spectrum(mps, cut).probabilities
            kept = nf.spectrum(cut).probabilities
            padded = np.zeros(orig.size)
            padded[: kept.size] = kept
            worst = max(worst, float(np.abs(np.sort(orig) - np.sort(padded)).max()))
    return _result("natural-form", worst, 1e-10)


def check_channel_reconstruction(trials: int = 200, seed: int = 20260814) -> CheckResult:
    """Spectrum-weighted conditionals rebuild the joint table."""
    rng = np.random.default_rng(seed + 4)
    worst = 0.0
    for trial in range(trials):
        mps = random_smps(rng, zero_fraction=0.2 if trial % 3 == 0 else 0.0)
        table = contract_to_table(mps)
        for cut in range(1, mps.num_sites):
            pair = channel_decomposition(mps, cut)
            diff = np.abs(pair.joint_weights().ravel() - table.weights).sum()
            worst = max(worst, float(diff))
    return _result("channel-reconstruction", worst, 1e-10)


def run_all(seed: int = 20260814, fast: bool = False) -> list:
    """Every check, sized for a quick run when ``fast`` is set."""
    trials = 60 if fast else 200
    return [
        check_quadratic_algebra(),
        check_oracle_equivalence(max_sites=4 if fast else 6),
        check_mean_field_line(),
        check_spectrum_support(),
        check_spectrum_decay(),
        check_entropy_log_bound(site_counts=(3, 6) if fast else (3, 6, 10, 20)),
        check_mi_spectrum_bound(trials=trials, seed=seed),
        check_truncation_bound(trials=max(trials // 2, 30), seed=seed),
        check_pinsker(trials=trials, seed=seed),
        check_natural_form(trials=trials, seed=seed),
        check_channel_reconstruction(trials=trials, seed=seed),
    ]
