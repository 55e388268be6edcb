"""Kinetic Monte Carlo sampling and plug-in information estimates.

A run simulates the open exclusion chain with the compiled kernel when it is
available and the pure-Python twin otherwise; both produce identical
trajectories for the same seed, so results never depend on which one was
built.  Set ``SMPS_KMC_BACKEND=python`` (or ``cython``) to force a backend.

Runs can be persisted to a small binary format: a fixed little-endian header
(magic, chain and sampling parameters, seed, counters) followed by the raw
uint64 sample words.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import entr

from . import _kmc_py
from .errors import CapacityError
from .models import AsepParams

try:
    from . import _kmc_cy
except ImportError:
    _kmc_cy = None

RNG_NAME = "splitmix64"
_BACKEND_ENV = "SMPS_KMC_BACKEND"
# plug-in mutual information is refused beyond this many sites
MAX_MI_SITES = 24
# sampled state words are uint64 bitmasks
_MAX_CHAIN_SITES = 63

_MAGIC = b"SMPSMC1\x00"
_HEADER = struct.Struct("<IddddQQQQQd")


def available_backends() -> tuple:
    return ("cython", "python") if _kmc_cy is not None else ("python",)


def default_backend() -> str:
    env = os.environ.get(_BACKEND_ENV)
    if env:
        return env
    return "cython" if _kmc_cy is not None else "python"


def _kernel(backend: str | None):
    name = backend if backend is not None else default_backend()
    if name == "python":
        return _kmc_py, "python"
    if name == "cython":
        if _kmc_cy is None:
            raise RuntimeError("compiled kernel is not built; use backend='python'")
        return _kmc_cy, "cython"
    raise ValueError(f"unknown backend {name!r}")


@dataclass(frozen=True)
class McConfig:
    """Sampling plan for one chain.

    ``sample_interval`` defaults to the chain length (about one sweep of the
    density profile between samples) and ``burn_in_time`` to twenty times the
    chain length.
    """

    params: AsepParams
    sample_count: int
    burn_in_time: float | None = None
    sample_interval: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.params.num_sites > _MAX_CHAIN_SITES:
            raise CapacityError(f"chains beyond {_MAX_CHAIN_SITES} sites do not fit a word")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.burn_in_time is None:
            object.__setattr__(self, "burn_in_time", 20.0 * self.params.num_sites)
        if self.sample_interval is None:
            object.__setattr__(self, "sample_interval", float(self.params.num_sites))
        if self.burn_in_time < 0.0:
            raise ValueError("burn_in_time must be nonnegative")
        if self.sample_interval <= 0.0:
            raise ValueError("sample_interval must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit word")


@dataclass(frozen=True)
class SampleRun:
    """States recorded at fixed intervals, plus event counters.

    ``injections`` and ``extractions`` count entry and exit events after the
    burn-in; their difference can never exceed the number of sites.
    ``duration`` is the time of the last applied event.
    """

    config: McConfig
    samples: np.ndarray = field(repr=False)
    events: int
    injections: int
    extractions: int
    duration: float
    backend: str


def simulate(config: McConfig, backend: str | None = None, initial_state: int = 0) -> SampleRun:
    """Run the chain from ``initial_state`` (default empty) and sample it."""
    mod, name = _kernel(backend)
    out = np.zeros(config.sample_count, dtype=np.uint64)
    events, injections, extractions, t_end = mod.run_chain(
        config.params.num_sites,
        config.params.alpha,
        config.params.beta,
        config.burn_in_time,
        config.sample_interval,
        out,
        config.seed,
        initial_state,
    )
    out.setflags(write=False)
    return SampleRun(config, out, events, injections, extractions, t_end, name)


def site_density_estimates(run: SampleRun, num_batches: int = 20):
    """Per-site occupation means with batch-means standard errors.

    Returns ``(density, std_error)`` arrays of length ``num_sites``; the
    samples are split into ``num_batches`` contiguous batches to absorb
    autocorrelation.
    """
    n = run.config.params.num_sites
    samples = run.samples
    if samples.size < num_batches:
        raise ValueError("fewer samples than batches")
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    bits = ((samples[:, None] >> shifts) & np.uint64(1)).astype(float)
    batches = np.array_split(bits, num_batches, axis=0)
    means = np.stack([b.mean(axis=0) for b in batches])
    density = bits.mean(axis=0)
    stderr = means.std(axis=0, ddof=1) / math.sqrt(num_batches)
    return density, stderr


@dataclass(frozen=True)
class MiEstimate:
    """Plug-in mutual information across a cut, with a batch-means error bar.

    ``insufficient_samples`` flags runs whose sample count is below one
    hundred times the observed joint support, where the plug-in bias can
    rival the estimate.
    """

    cut: int
    estimate: float
    std_error: float
    sample_count: int
    joint_support: int
    insufficient_samples: bool


def _entropy_of_counts(counts: np.ndarray) -> float:
    p = counts / counts.sum()
    return float(entr(p).sum() / math.log(2.0))


def _plugin_mi(samples: np.ndarray, num_sites: int, cut: int):
    right_bits = np.uint64(num_sites - cut)
    left = samples >> right_bits
    right = samples & ((np.uint64(1) << right_bits) - np.uint64(1))
    _, joint_counts = np.unique(samples, return_counts=True)
    _, left_counts = np.unique(left, return_counts=True)
    _, right_counts = np.unique(right, return_counts=True)
    mi = (
        _entropy_of_counts(left_counts)
        + _entropy_of_counts(right_counts)
        - _entropy_of_counts(joint_counts)
    )
    return max(mi, 0.0), joint_counts.size


def estimate_mutual_information(
    source, cut: int | None = None, *, backend: str | None = None, num_batches: int = 20
) -> MiEstimate:
    """Plug-in mutual information between the two sides of a cut.

    ``source`` is an :class:`McConfig` (a fresh run is simulated) or an
    existing :class:`SampleRun`.  The point estimate uses all samples; the
    error bar is the standard error of the estimates over ``num_batches``
    contiguous batches.
    """
    if isinstance(source, McConfig):
        run = simulate(source, backend=backend)
    elif isinstance(source, SampleRun):
        run = source
    else:
        raise TypeError("source must be an McConfig or a SampleRun")
    n = run.config.params.num_sites
    if n > MAX_MI_SITES:
        raise CapacityError(f"plug-in estimate beyond {MAX_MI_SITES} sites is refused")
    if cut is None:
        cut = n // 2
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must lie in 1..{n - 1}")
    if run.samples.size < num_batches:
        raise ValueError("fewer samples than batches")
    estimate, support = _plugin_mi(run.samples, n, cut)
    batch_values = [
        _plugin_mi(chunk, n, cut)[0]
        for chunk in np.array_split(run.samples, num_batches)
    ]
    stderr = float(np.std(batch_values, ddof=1) / math.sqrt(num_batches))
    return MiEstimate(
        cut=cut,
        estimate=estimate,
        std_error=stderr,
        sample_count=int(run.samples.size),
        joint_support=support,
        insufficient_samples=bool(run.samples.size < 100 * support),
    )


def save_run(path, run: SampleRun) -> None:
    """Persist a run; see the module docstring for the layout."""
    cfg = run.config
    header = _HEADER.pack(
        cfg.params.num_sites,
        cfg.params.alpha,
        cfg.params.beta,
        cfg.burn_in_time,
        cfg.sample_interval,
        cfg.seed,
        run.samples.size,
        run.events,
        run.injections,
        run.extractions,
        run.duration,
    )
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(header)
        fh.write(run.samples.astype("<u8", copy=False).tobytes())


def load_run(path) -> SampleRun:
    """Read back a run written by :func:`save_run`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a sample-run file")
        (
            num_sites,
            alpha,
            beta,
            burn_in,
            interval,
            seed,
            count,
            events,
            injections,
            extractions,
            duration,
        ) = _HEADER.unpack(fh.read(_HEADER.size))
        samples = np.frombuffer(fh.read(8 * count), dtype="<u8", count=count)
    samples = samples.astype(np.uint64)
    samples.setflags(write=False)
    config = McConfig(
        AsepParams(alpha, beta, num_sites),
        sample_count=count,
        burn_in_time=burn_in,
        sample_interval=interval,
        seed=seed,
    )
    return SampleRun(
        config, samples, events, injections, extractions, duration, "file"
    )
