import math

import numpy as np
import pytest

from hybridlab.bounds import HybridCodeSpec, lossless_mac_spec, noiseless_pair_mac
from hybridlab.infotheory import ConditionalPmf, DistortionMeasure, JointPmf, Pmf
from hybridlab.sim import (
    Codebook,
    MacScenario,
    MemoryCapError,
    P2pScenario,
    TrialConfig,
    codebook_size,
    derived_seed,
    generate_codebook,
    lemma1_check,
    lemma1_exact_n2,
    run_mac,
    run_p2p,
)

UNIF2 = Pmf.uniform(2)
HAMMING2 = DistortionMeasure.hamming(2)


def bec(e):
    return ConditionalPmf([[1 - e, 0.0, e], [0.0, 1 - e, e]])


def erasure_scenario():
    scenario = P2pScenario(source=UNIF2, channel=bec(0.5), distortion=HAMMING2)
    spec = HybridCodeSpec(
        aux_size=2,
        aux_kernel=ConditionalPmf.bsc(0.3),
        enc_map=[[0, 0], [1, 1]],
        dec_map=[[0, 1, 0], [0, 1, 1]],
        rate=0.35,
    )
    return scenario, spec


class TestSeeds:
    def test_derived_seed_deterministic(self):
        assert derived_seed(7, 1, 3) == derived_seed(7, 1, 3)

    def test_derived_seed_separates_streams(self):
        seen = {derived_seed(0, p, t) for p in range(4) for t in range(50)}
        assert len(seen) == 200

    def test_root_seed_matters(self):
        assert derived_seed(0, 0, 0) != derived_seed(1, 0, 0)


class TestCodebook:
    def test_size_floor(self):
        assert codebook_size(10, 0.5) == 32
        assert codebook_size(10, 0.55) == 45
        assert codebook_size(4, 0.0) == 1

    def test_bit_identical_regeneration(self):
        a = generate_codebook(8, 0.5, UNIF2, seed=123)
        b = generate_codebook(8, 0.5, UNIF2, seed=123)
        assert np.array_equal(a.entries, b.entries)

    def test_different_seed_differs(self):
        a = generate_codebook(10, 0.8, UNIF2, seed=1)
        b = generate_codebook(10, 0.8, UNIF2, seed=2)
        assert not np.array_equal(a.entries, b.entries)

    def test_memory_cap(self):
        with pytest.raises(MemoryCapError):
            generate_codebook(40, 0.9, UNIF2, seed=0, memory_cap=1000)

    def test_entries_readonly(self):
        cb = generate_codebook(8, 0.5, UNIF2, seed=0)
        with pytest.raises(ValueError):
            cb.entries[0, 0] = 1


class TestTrialConfig:
    def test_requires_eps_order(self):
        with pytest.raises(ValueError):
            TrialConfig(n=8, trials=10, epsilon=0.1, epsilon_prime=0.2)

    def test_requires_positive(self):
        with pytest.raises(ValueError):
            TrialConfig(n=8, trials=10, epsilon=0.3, epsilon_prime=0.0)


class TestRunP2p:
    def test_report_shape_and_ranges(self):
        scenario, spec = erasure_scenario()
        cfg = TrialConfig(n=8, trials=60, epsilon=0.75, epsilon_prime=0.5, seed=0)
        rep = run_p2p(scenario, spec, cfg)
        assert rep["n"] == 8 and rep["trials"] == 60
        for key in ("p_e1", "p_e2_given_not_e1", "p_e3", "p_error"):
            assert 0.0 <= rep[key] <= 1.0
        assert rep["p_error"] >= max(rep["p_e1"], rep["p_e3"]) - 1e-12
        assert 0.0 <= rep["mean_distortion"] <= 1.0
        assert rep["halfwidth_error"] >= 0.0

    def test_deterministic_given_seed(self):
        scenario, spec = erasure_scenario()
        cfg = TrialConfig(n=8, trials=40, epsilon=0.75, epsilon_prime=0.5, seed=5)
        assert run_p2p(scenario, spec, cfg) == run_p2p(scenario, spec, cfg)

    def test_seed_changes_outcome(self):
        scenario, spec = erasure_scenario()
        reps = [run_p2p(scenario, spec,
                        TrialConfig(n=8, trials=40, epsilon=0.75,
                                    epsilon_prime=0.5, seed=s))
                for s in (0, 1)]
        assert reps[0] != reps[1]

    def test_uncoded_distortion_matches_channel(self):
        scenario = P2pScenario(source=UNIF2, channel=ConditionalPmf.bsc(0.1),
                               distortion=HAMMING2)
        spec = HybridCodeSpec.uncoded(enc=[0, 1], dec=[0, 1], num_sources=2)
        cfg = TrialConfig(n=500, trials=40, epsilon=0.3, epsilon_prime=0.2, seed=0)
        rep = run_p2p(scenario, spec, cfg)
        assert rep["mean_distortion"] == pytest.approx(0.1, abs=0.02)

    def test_memory_cap_enforced(self):
        scenario, spec = erasure_scenario()
        cfg = TrialConfig(n=64, trials=1, epsilon=0.75, epsilon_prime=0.5,
                          memory_cap=500)
        with pytest.raises(MemoryCapError):
            run_p2p(scenario, spec, cfg)


class TestRunMac:
    @staticmethod
    def scenario_and_spec():
        sources = JointPmf([[0.35, 0.15], [0.15, 0.35]])
        scenario = MacScenario(sources=sources, mac=noiseless_pair_mac(2, 2),
                               d1=HAMMING2, d2=HAMMING2)
        spec = lossless_mac_spec(sources, UNIF2, UNIF2, 2, 2, 4)
        return scenario, spec

    def test_report_shape_and_determinism(self):
        scenario, spec = self.scenario_and_spec()
        cfg = TrialConfig(n=6, trials=30, epsilon=0.75, epsilon_prime=0.5, seed=0)
        rep = run_mac(scenario, spec, cfg)
        for key in ("p_e1", "p_e2", "p_e3", "p_e4", "p_e5", "p_e6", "p_error"):
            assert 0.0 <= rep[key] <= 1.0
        assert rep == run_mac(scenario, spec, cfg)

    def test_union_bound_consistency(self):
        scenario, spec = self.scenario_and_spec()
        cfg = TrialConfig(n=6, trials=30, epsilon=0.75, epsilon_prime=0.5, seed=3)
        rep = run_mac(scenario, spec, cfg)
        singles = max(rep[f"p_{k}"] for k in ("e1", "e2", "e3", "e4", "e5", "e6"))
        total = sum(rep[f"p_{k}"] for k in ("e1", "e2", "e3", "e4", "e5", "e6"))
        assert singles - 1e-12 <= rep["p_error"] <= total + 1e-12

    def test_rejects_time_sharing(self):
        scenario, spec = self.scenario_and_spec()
        bad = lossless_mac_spec(scenario.sources, UNIF2, UNIF2, 2, 2, 4)
        object.__setattr__(bad, "q_pmf", Pmf.uniform(2))
        cfg = TrialConfig(n=4, trials=2, epsilon=0.75, epsilon_prime=0.5)
        with pytest.raises(ValueError):
            run_mac(scenario, bad, cfg)

    def test_noiseless_identity_maps_zero_distortion(self):
        # Symbol maps that carry the source through the noiseless pair
        # channel directly: distortion is zero no matter which error events
        # fire, and the two single-index packing events are symmetric.
        from hybridlab.bounds import MacHybridSpec

        sources = JointPmf([[0.35, 0.15], [0.15, 0.35]])
        scenario = MacScenario(sources=sources, mac=noiseless_pair_mac(2, 2),
                               d1=HAMMING2, d2=HAMMING2)
        aux = np.zeros((1, 2, 2))
        aux[0] = np.eye(2)                       # u_j = s_j
        enc = np.zeros((1, 2, 2), dtype=int)
        enc[0] = [[0, 1], [0, 1]]                # x_j = s_j regardless of u_j
        y = np.arange(4)
        dec1 = np.broadcast_to(y // 2, (1, 2, 2, 4)).copy()   # shat1 from y
        dec2 = np.broadcast_to(y % 2, (1, 2, 2, 4)).copy()
        spec = MacHybridSpec(q_pmf=Pmf([1.0]), aux1=aux, aux2=aux,
                             enc1=enc, enc2=enc, dec1=dec1, dec2=dec2,
                             R1=1.0, R2=1.0)
        cfg = TrialConfig(n=8, trials=200, epsilon=0.75, epsilon_prime=0.5, seed=0)
        rep = run_mac(scenario, spec, cfg)
        assert rep["mean_distortion_1"] == 0.0
        assert rep["mean_distortion_2"] == 0.0
        assert abs(rep["p_e5"] - rep["p_e6"]) <= (
            rep["halfwidth_e5"] + rep["halfwidth_e6"] + 0.05)

    def test_memory_cap_enforced(self):
        import dataclasses

        scenario, spec = self.scenario_and_spec()
        spec = dataclasses.replace(spec, R1=1.0, R2=1.0)
        cfg = TrialConfig(n=16, trials=1, epsilon=0.75, epsilon_prime=0.5,
                          memory_cap=200)
        with pytest.raises(MemoryCapError):
            run_mac(scenario, spec, cfg)


IDENTITY_COUPLING = JointPmf(np.eye(2) / 2)


class TestLemma1:
    def test_exact_oracle_identity_coupling(self):
        res = lemma1_exact_n2(0.5, IDENTITY_COUPLING, eps_prime=0.25)
        assert res["max_ratio"] == pytest.approx(4.0 / 3.0, abs=1e-12)
        for cell in res["cells"].values():
            assert sum(cell["conditional"].values()) == pytest.approx(1.0, abs=1e-12)

    def test_exact_oracle_rejects_other_sizes(self):
        with pytest.raises(ValueError):
            lemma1_exact_n2(1.5, IDENTITY_COUPLING, eps_prime=0.25)

    def test_empirical_check_deterministic(self):
        a = lemma1_check(2, 0.5, IDENTITY_COUPLING, 0.25, outer_trials=400,
                         seed=0, min_count=5)
        b = lemma1_check(2, 0.5, IDENTITY_COUPLING, 0.25, outer_trials=400,
                         seed=0, min_count=5)
        assert a == b
        assert a["kept"] <= a["trials"]

    def test_empirical_matches_oracle_coarsely(self):
        res = lemma1_check(2, 0.5, IDENTITY_COUPLING, 0.25, outer_trials=3000,
                           seed=0, min_count=30)
        assert res["conclusive"]
        assert res["max_ratio"] < 2.0

    def test_rate_too_small(self):
        with pytest.raises(ValueError):
            lemma1_check(2, 0.0, IDENTITY_COUPLING, 0.25, outer_trials=10)
