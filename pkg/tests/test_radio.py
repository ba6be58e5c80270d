import numpy as np
import pytest

from rbsched import (ConfigurationError, InvalidParameterError, McsTable,
                     ScenarioConfig, compute_snr, generate_instance,
                     link_adaptation, load_instance, save_instance)


@pytest.fixture
def config():
    return ScenarioConfig()


@pytest.fixture
def mcs(config):
    return McsTable.default(config.rb_bandwidth)


class TestComputeSnr:
    def test_zero_channel(self):
        assert compute_snr(0.35, 1e-12, 0.0, 5.688e-15) == 0.0

    def test_identity_case(self):
        assert compute_snr(1.0, 1.0, 1.0, 1.0) == 1.0

    def test_against_extended_precision_oracle(self):
        # independent re-evaluation at 50 decimal digits
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 50
        noise = 3.16e-20 * 180e3
        expected = float(mp.mpf(0.35) * mp.mpf(1e-13) * mp.mpf(1.2) ** 2 / mp.mpf(noise))
        assert expected == pytest.approx(8.860759493670885, rel=1e-15)  # frozen
        got = compute_snr(0.35, 1e-13, 1.2, noise)
        assert got == pytest.approx(expected, rel=1e-12)

    def test_homogeneity_in_power(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p, a, h, n = rng.uniform(0.01, 10.0, size=4)
            base = compute_snr(p, a, h, n)
            # powers of two scale exactly; other factors within rounding
            for c in (0.25, 2.0, 1024.0):
                assert compute_snr(c * p, a, h, n) == c * base
            c = rng.uniform(0.1, 9.0)
            assert compute_snr(c * p, a, h, n) == pytest.approx(c * base, rel=1e-12)

    @pytest.mark.parametrize("bad", [
        (np.nan, 1.0, 1.0, 1.0),
        (1.0, np.inf, 1.0, 1.0),
        (-1.0, 1.0, 1.0, 1.0),
        (1.0, 1.0, 1.0, 0.0),
    ])
    def test_invalid_inputs(self, bad):
        with pytest.raises(InvalidParameterError):
            compute_snr(*bad)


class TestMcsTable:
    def test_default_shape(self, config, mcs):
        # 15 positive-rate levels plus the no-transmission level
        assert len(mcs) == 16
        assert mcs.thresholds[0] == 0.0 and mcs.rates[0] == 0.0
        assert np.all(np.diff(mcs.thresholds) > 0)
        assert np.all(np.diff(mcs.rates) >= 0)
        # rates are integer-valued bits/s
        assert np.all(mcs.rates == np.floor(mcs.rates))

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            McsTable([], [])
        with pytest.raises(ConfigurationError):
            McsTable([0.0, 1.0, 1.0], [0.0, 5.0, 6.0])   # not strictly increasing
        with pytest.raises(ConfigurationError):
            McsTable([0.0, 1.0], [0.0, -1.0])
        with pytest.raises(ConfigurationError):
            McsTable([0.0, 1.0], [3.0, 5.0])             # first rate must be 0

    def test_file_round_trip(self, mcs, tmp_path):
        path = tmp_path / "table.csv"
        mcs.to_file(path)
        loaded = McsTable.from_file(path)
        assert np.array_equal(loaded.thresholds, mcs.thresholds)
        assert np.array_equal(loaded.rates, mcs.rates)


class TestLinkAdaptation:
    def test_below_all_thresholds(self, mcs):
        assert link_adaptation(0.0, mcs) == 0.0
        assert link_adaptation(mcs.thresholds[1] * 0.999, mcs) == 0.0

    def test_saturation(self, mcs):
        assert link_adaptation(1e30, mcs) == mcs.rates[-1]

    def test_exact_thresholds_match_linear_scan(self, mcs):
        def scan(snr):
            # independent oracle: last level whose threshold is <= snr
            best = 0.0
            for t, r in zip(mcs.thresholds, mcs.rates):
                if snr >= t:
                    best = r
            return best

        for t in mcs.thresholds:
            assert link_adaptation(t, mcs) == scan(t)
        rng = np.random.default_rng(1)
        for snr in rng.uniform(0, 120, size=500):
            assert link_adaptation(snr, mcs) == scan(snr)

    def test_monotone_nondecreasing(self, mcs):
        rng = np.random.default_rng(2)
        for _ in range(500):
            s1, s2 = sorted(rng.uniform(0, 150, size=2))
            assert link_adaptation(s1, mcs) <= link_adaptation(s2, mcs)

    def test_vectorized_matches_scalar(self, mcs):
        snr = np.random.default_rng(3).uniform(0, 100, size=(4, 6))
        rates = link_adaptation(snr, mcs)
        for j in range(4):
            for n in range(6):
                assert rates[j, n] == link_adaptation(snr[j, n], mcs)

    def test_negative_snr_rejected(self, mcs):
        with pytest.raises(InvalidParameterError):
            link_adaptation(-0.1, mcs)


class TestNoisePower:
    def test_single_multiplication(self, config):
        assert config.noise_power == 3.16e-20 * 12 * 15e3
        assert config.rb_bandwidth == 180e3


class TestGenerateInstance:
    def test_same_seed_is_bit_exact(self, config):
        a = generate_instance(config, np.random.default_rng(123))
        b = generate_instance(config, np.random.default_rng(123))
        assert np.array_equal(a.snr, b.snr)
        assert np.array_equal(a.rate, b.rate)

    def test_different_seeds_differ(self, config):
        a = generate_instance(config, np.random.default_rng(1))
        b = generate_instance(config, np.random.default_rng(2))
        assert not np.array_equal(a.snr, b.snr)

    def test_degenerate_randomness_pins_pathloss(self):
        # no shadowing and a collapsed annulus leave only the pure
        # path-loss large-scale gain; dividing it out of the SNRs must
        # leave unit-mean fading power (many RBs tighten the sample mean)
        config = ScenarioConfig(num_rbs=200, shadowing_stddev_db=0.0,
                                min_distance=100.0 - 1e-9, cell_radius=100.0)
        inst = generate_instance(config, np.random.default_rng(5))
        alpha = 10 ** (-(35.3 + 37.6 * np.log10(100.0)) / 10.0)
        h_sq = inst.snr * config.noise_power / (config.power_per_rb * alpha)
        assert np.all(h_sq >= 0)
        assert h_sq.mean() == pytest.approx(1.0, abs=0.1)

    def test_fading_second_moment_is_unity(self):
        draws = np.random.default_rng(11).rayleigh(scale=1.0 / np.sqrt(2.0),
                                                   size=100_000)
        assert np.mean(draws ** 2) == pytest.approx(1.0, abs=0.02)

    def test_rates_follow_link_adaptation(self, config, mcs):
        inst = generate_instance(config, np.random.default_rng(9), mcs=mcs)
        assert np.array_equal(inst.rate, link_adaptation(inst.snr, mcs))

    def test_dimensions_and_metadata(self, config):
        inst = generate_instance(config, np.random.default_rng(4), instance_id=17)
        assert inst.snr.shape == (4, 6)
        assert inst.instance_id == 17
        assert np.array_equal(inst.service_of, [0, 0, 1, 1])
        assert np.array_equal(inst.min_satisfied, [2, 1])


class TestInstanceFile:
    def test_round_trip_is_bit_exact(self, config, tmp_path):
        inst = generate_instance(config, np.random.default_rng(21), instance_id=3)
        path = tmp_path / "inst.csv"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert loaded.instance_id == 3
        assert np.array_equal(loaded.snr, inst.snr)
        assert np.array_equal(loaded.rate, inst.rate)
        assert np.array_equal(loaded.qos, inst.qos)
        assert np.array_equal(loaded.service_of, inst.service_of)
        assert np.array_equal(loaded.min_satisfied, inst.min_satisfied)

    def test_rows_are_ue_by_rb(self, config, tmp_path):
        inst = generate_instance(config, np.random.default_rng(22))
        path = tmp_path / "inst.csv"
        save_instance(inst, path)
        snr_rows = [l for l in path.read_text().splitlines() if l.startswith("snr,")]
        assert len(snr_rows) == inst.num_ues
        assert len(snr_rows[0].split(",")) == 2 + inst.num_rbs
