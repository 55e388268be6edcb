import numpy as np
import pytest

from smps import (
    AsepParams,
    CapacityError,
    McConfig,
    asep_mps,
    estimate_mutual_information,
    factorize_at_cut,
    load_run,
    marginal,
    mutual_information,
    save_run,
    simulate,
    site_density_estimates,
    steady_state_table,
)
from smps import mcsim
from smps import _kmc_py

HAVE_CY = "cython" in mcsim.available_backends()


class TestKernelContract:
    def test_empty_absorbing_state_without_injection(self):
        # kernel-level: zero entry rate and an empty lattice means no events
        out = np.zeros(50, dtype=np.uint64)
        events, inj, ext, t_end = _kmc_py.run_chain(4, 0.0, 0.5, 1.0, 1.0, out, 9, 0)
        assert events == inj == ext == 0
        assert np.all(out == 0)

    @pytest.mark.skipif(not HAVE_CY, reason="compiled kernel not built")
    def test_empty_absorbing_state_compiled(self):
        from smps import _kmc_cy

        out = np.zeros(50, dtype=np.uint64)
        events, inj, ext, t_end = _kmc_cy.run_chain(4, 0.0, 0.5, 1.0, 1.0, out, 9, 0)
        assert events == inj == ext == 0
        assert np.all(out == 0)

    def test_drain_only(self):
        # full lattice, no injection: every particle eventually leaves
        out = np.zeros(20, dtype=np.uint64)
        events, inj, ext, _ = _kmc_py.run_chain(3, 0.0, 1.0, 0.0, 5.0, out, 123, 0b111)
        assert ext == 3 and inj == 0
        assert out[-1] == 0


class TestSimulate:
    def test_same_seed_same_trajectory(self):
        cfg = McConfig(AsepParams(0.4, 0.5, 6), sample_count=2000, seed=31)
        a = simulate(cfg, backend="python")
        b = simulate(cfg, backend="python")
        assert np.array_equal(a.samples, b.samples)
        assert (a.events, a.injections, a.extractions, a.duration) == (
            b.events,
            b.injections,
            b.extractions,
            b.duration,
        )

    def test_different_seeds_differ(self):
        base = McConfig(AsepParams(0.4, 0.5, 6), sample_count=2000, seed=31)
        other = McConfig(AsepParams(0.4, 0.5, 6), sample_count=2000, seed=32)
        assert not np.array_equal(simulate(base).samples, simulate(other).samples)

    @pytest.mark.skipif(not HAVE_CY, reason="compiled kernel not built")
    def test_backends_are_twins(self):
        for seed in (0, 7, 2**63 + 11):
            cfg = McConfig(AsepParams(0.3, 0.7, 9), sample_count=3000, seed=seed)
            py = simulate(cfg, backend="python")
            cy = simulate(cfg, backend="cython")
            assert np.array_equal(py.samples, cy.samples)
            assert py.events == cy.events
            assert py.injections == cy.injections
            assert py.extractions == cy.extractions
            assert py.duration == cy.duration

    def test_unknown_backend(self):
        cfg = McConfig(AsepParams(0.3, 0.7, 4), sample_count=100)
        with pytest.raises(ValueError):
            simulate(cfg, backend="fortran")

    def test_particle_conservation(self):
        cfg = McConfig(AsepParams(0.9, 0.2, 10), sample_count=20_000, seed=5)
        run = simulate(cfg)
        # entries minus exits after burn-in can differ by at most one lattice load
        assert abs(run.injections - run.extractions) <= 10
        assert run.events > 0 and run.duration > 0.0

    def test_states_fit_lattice(self):
        cfg = McConfig(AsepParams(0.8, 0.8, 5), sample_count=5000, seed=2)
        run = simulate(cfg)
        assert int(run.samples.max()) < 2**5

    def test_config_validation(self):
        params = AsepParams(0.5, 0.5, 4)
        with pytest.raises(ValueError):
            McConfig(params, sample_count=0)
        with pytest.raises(ValueError):
            McConfig(params, sample_count=10, burn_in_time=-1.0)
        with pytest.raises(ValueError):
            McConfig(params, sample_count=10, sample_interval=0.0)
        with pytest.raises(ValueError):
            McConfig(params, sample_count=10, seed=-1)
        cfg = McConfig(params, sample_count=10)
        assert cfg.sample_interval == 4.0
        assert cfg.burn_in_time == 80.0


class TestDensities:
    def test_single_site_occupation(self):
        cfg = McConfig(AsepParams(0.3, 0.6, 1), sample_count=50_000, seed=7)
        dens, err = site_density_estimates(simulate(cfg))
        assert abs(dens[0] - 1.0 / 3.0) <= 4.0 * err[0]

    def test_profile_matches_oracle(self):
        params = AsepParams(0.3, 0.3, 8)
        cfg = McConfig(params, sample_count=100_000, seed=11)
        dens, err = site_density_estimates(simulate(cfg))
        table = steady_state_table(params)
        exact = np.array([marginal(table, [s]).weights[1] for s in range(1, 9)])
        assert np.all(np.abs(dens - exact) <= 4.0 * err)


class TestMiEstimator:
    def test_matches_exact_value(self):
        params = AsepParams(0.3, 0.3, 8)
        cfg = McConfig(params, sample_count=200_000, seed=11)
        est = estimate_mutual_information(cfg)
        exact = mutual_information(factorize_at_cut(asep_mps(params), 4))
        assert est.cut == 4
        assert abs(est.estimate - exact) <= max(3.0 * est.std_error, 0.02)
        assert not est.insufficient_samples

    def test_product_line_is_noise_plus_bias(self):
        params = AsepParams(0.4, 0.6, 6)
        cfg = McConfig(params, sample_count=100_000, seed=3)
        est = estimate_mutual_information(cfg)
        # plug-in bias is at most (joint support - 1) / (2 n ln 2)
        bias_cap = (est.joint_support - 1) / (2.0 * est.sample_count * np.log(2.0))
        assert est.estimate <= 3.0 * est.std_error + bias_cap + 1e-6

    def test_error_shrinks_with_samples(self):
        params = AsepParams(0.25, 0.4, 6)
        exact = mutual_information(factorize_at_cut(asep_mps(params), 3))
        errs = []
        for count in (2_000, 20_000, 200_000):
            est = estimate_mutual_information(
                McConfig(params, sample_count=count, seed=17)
            )
            errs.append(abs(est.estimate - exact))
        assert errs[2] < errs[0]

    def test_insufficient_samples_flag(self):
        cfg = McConfig(AsepParams(0.5, 0.4, 10), sample_count=500, seed=19)
        est = estimate_mutual_information(cfg)
        assert est.insufficient_samples

    def test_reuses_existing_run(self):
        cfg = McConfig(AsepParams(0.3, 0.3, 6), sample_count=5_000, seed=23)
        run = simulate(cfg)
        a = estimate_mutual_information(run, 3)
        b = estimate_mutual_information(cfg, 3)
        assert a == b

    def test_guards(self):
        run = simulate(McConfig(AsepParams(0.3, 0.3, 4), sample_count=100, seed=1))
        with pytest.raises(ValueError):
            estimate_mutual_information(run, 4)
        with pytest.raises(ValueError):
            estimate_mutual_information(run, 1, num_batches=500)
        with pytest.raises(TypeError):
            estimate_mutual_information("run")
        big = McConfig(AsepParams(0.3, 0.3, 25), sample_count=100, seed=1)
        with pytest.raises(CapacityError):
            estimate_mutual_information(big)


class TestPersistence:
    def test_roundtrip(self, tmp_path):
        cfg = McConfig(
            AsepParams(0.35, 0.65, 7),
            sample_count=4000,
            burn_in_time=12.5,
            sample_interval=3.0,
            seed=99,
        )
        run = simulate(cfg)
        path = tmp_path / "run.bin"
        save_run(path, run)
        back = load_run(path)
        assert np.array_equal(back.samples, run.samples)
        assert back.config == cfg
        assert back.events == run.events
        assert back.injections == run.injections
        assert back.extractions == run.extractions
        assert back.duration == run.duration

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a run file at all")
        with pytest.raises(ValueError):
            load_run(path)
