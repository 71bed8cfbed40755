import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridlab.gaussian_twrc import (
    GaussianTwrcParams,
    SchemeParams,
    af_rates,
    fig8_sweep,
    gauss_c,
    hc_general_rates,
    hc_special_rates,
    nnc_rates,
    optimize_scheme,
    params_from_distance,
    sweep_to_csv,
)

snr = st.floats(0.1, 50.0)


def random_params(seed):
    rng = np.random.default_rng(seed)
    s = 10 ** rng.uniform(-1, 2, size=4)
    return GaussianTwrcParams(S13=s[0], S23=s[1], S31=s[2], S32=s[3])


class TestGaussC:
    def test_zero(self):
        assert gauss_c(0.0) == 0.0

    def test_unit(self):
        assert gauss_c(1.0) == pytest.approx(0.5, abs=1e-12)

    @given(st.floats(0.0, 1e4))
    def test_monotone_nonneg(self, x):
        assert gauss_c(x) >= 0.0
        assert gauss_c(x + 1.0) > gauss_c(x)


class TestSchemeRates:
    @given(snr, snr, snr, snr)
    @settings(max_examples=50)
    def test_nnc_equals_alpha_beta_zero(self, a, b, c, d):
        p = GaussianTwrcParams(S13=a, S23=b, S31=c, S32=d)
        got = hc_general_rates(p, SchemeParams(alpha=0.0, beta=0.0, sigma2=1.0))
        ref = nnc_rates(p, sigma2=1.0)
        assert got.R1 == pytest.approx(ref.R1, abs=1e-9)
        assert got.R2 == pytest.approx(ref.R2, abs=1e-9)

    @given(snr, snr, snr, snr)
    @settings(max_examples=50)
    def test_special_case_alpha0_beta1(self, a, b, c, d):
        p = GaussianTwrcParams(S13=a, S23=b, S31=c, S32=d)
        got = hc_general_rates(p, SchemeParams(alpha=0.0, beta=1.0, sigma2=2.0))
        ref = hc_special_rates(p, sigma2=2.0)
        assert got.R1 == pytest.approx(ref.R1, abs=1e-9)
        assert got.R2 == pytest.approx(ref.R2, abs=1e-9)

    @given(snr, snr, snr, snr)
    @settings(max_examples=50)
    def test_af_limit(self, a, b, c, d):
        p = GaussianTwrcParams(S13=a, S23=b, S31=c, S32=d)
        got = hc_general_rates(p, SchemeParams(alpha=1.0, beta=0.0, sigma2=1e8))
        ref = af_rates(p)
        assert got.R1 == pytest.approx(ref.R1, abs=1e-3)
        assert got.R2 == pytest.approx(ref.R2, abs=1e-3)

    @given(st.integers(0, 200))
    @settings(max_examples=40)
    def test_rates_nonnegative(self, seed):
        p = random_params(seed)
        rng = np.random.default_rng(seed + 1)
        alpha = rng.uniform(0, 1)
        beta = rng.uniform(0, 1 - alpha)
        pt = hc_general_rates(p, SchemeParams(alpha=alpha, beta=beta, sigma2=rng.uniform(0.1, 10)))
        assert pt.R1 >= 0.0 and pt.R2 >= 0.0

    def test_af_symmetric(self):
        ps = GaussianTwrcParams(S13=5.0, S23=5.0, S31=7.0, S32=7.0)
        pt = af_rates(ps)
        assert pt.R1 == pytest.approx(pt.R2, abs=1e-12)

    def test_symmetric_channel_symmetric_rates(self):
        p = GaussianTwrcParams(S13=3.0, S23=3.0, S31=6.0, S32=6.0)
        for fn in (nnc_rates, hc_special_rates):
            pt = fn(p, sigma2=1.7)
            assert pt.R1 == pytest.approx(pt.R2, abs=1e-12)


class TestOptimization:
    def test_scheme_ordering_midpoint(self):
        p = params_from_distance(0.5)
        sums = {name: optimize_scheme(p, name).sum_rate
                for name in ("af", "nnc", "hc_special", "hc_general", "cutset")}
        assert sums["cutset"] >= sums["hc_general"] - 1e-9
        assert sums["hc_general"] >= sums["hc_special"] - 1e-9
        assert sums["hc_special"] >= sums["nnc"] - 1e-6
        assert sums["hc_general"] >= sums["af"] - 1e-9

    def test_optimize_beats_fixed_sigma(self):
        p = params_from_distance(0.3)
        best = optimize_scheme(p, "nnc")
        fixed = nnc_rates(p, sigma2=1.0)
        assert best.sum_rate >= fixed.sum_rate - 1e-9

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            optimize_scheme(params_from_distance(0.5), "nope")


class TestSweep:
    def test_columns_and_dominance(self):
        rows = fig8_sweep(r_grid=[0.2, 0.5, 0.8])
        assert [round(r["r"], 3) for r in rows] == [0.2, 0.5, 0.8]
        for row in rows:
            assert row["R_CS"] >= row["R_HC"] - 1e-9
            assert row["R_HC"] >= row["R_NNC"] - 1e-6
            assert row["R_AF"] >= 0.0

    def test_csv_format(self):
        rows = fig8_sweep(r_grid=[0.4])
        text = sweep_to_csv(rows)
        parsed = list(csv.reader(io.StringIO(text)))
        assert parsed[0] == ["r", "R_CS", "R_AF", "R_NNC", "R_HC"]
        assert len(parsed) == 2
        assert float(parsed[1][0]) == pytest.approx(0.4)

    def test_params_from_distance_symmetry(self):
        p = params_from_distance(0.5)
        assert p.S13 == pytest.approx(p.S23, abs=1e-12)
        assert p.S31 == pytest.approx(p.S32, abs=1e-12)

    def test_params_from_distance_monotone(self):
        near = params_from_distance(0.1)
        far = params_from_distance(0.9)
        assert near.S13 > far.S13
