import itertools

import numpy as np
import pytest

from rbsched import (Instance, InvalidParameterError, ScenarioConfig, evaluate,
                     generate_instance, reward)


def make_instance(rate, qos, service_of, min_satisfied):
    rate = np.asarray(rate, dtype=float)
    return Instance(snr=np.ones_like(rate), rate=rate, qos=qos,
                    service_of=service_of, min_satisfied=min_satisfied)


def reference_evaluate(instance, assignment):
    """Straight-line re-computation looping over every (ue, rb) pair."""
    j, n = instance.num_ues, instance.num_rbs
    thr = [0.0] * j
    for ue in range(j):
        for rb in range(n):
            if assignment[rb] == ue:
                thr[ue] += instance.rate[ue, rb]
    satisfied = [thr[ue] >= instance.qos[ue] for ue in range(j)]
    counts = [0] * instance.num_services
    for ue in range(j):
        if satisfied[ue]:
            counts[instance.service_of[ue]] += 1
    feasible = all(counts[svc] >= instance.min_satisfied[svc]
                   for svc in range(instance.num_services))
    return thr, satisfied, counts, feasible


def reference_reward(instance, assignment):
    """Independent straight-line re-implementation of the shaped reward."""
    thr, satisfied, counts, _ = reference_evaluate(instance, assignment)
    phi = sum(thr)
    theta = 0.0
    for svc in range(instance.num_services):
        if counts[svc] < instance.min_satisfied[svc]:
            for ue in range(instance.num_ues):
                if instance.service_of[ue] == svc and thr[ue] < instance.qos[ue]:
                    theta += (thr[ue] - instance.qos[ue]) / instance.qos[ue]
    if theta < 0:
        if phi == 0.0:
            return -float(sum(instance.min_satisfied))
        phi = theta / phi
    return phi


class TestEvaluate:
    def test_all_rates_zero(self):
        inst = make_instance(np.zeros((3, 4)), qos=[10, 10, 10],
                             service_of=[0, 0, 1], min_satisfied=[1, 1])
        report = evaluate(inst, np.zeros(4, dtype=int))
        assert np.array_equal(report.throughput_per_ue, np.zeros(3))
        assert not report.feasible

    def test_single_cell_case(self):
        inst = make_instance([[5.0]], qos=[3.0], service_of=[0], min_satisfied=[1])
        report = evaluate(inst, np.array([0]))
        assert report.throughput_per_ue[0] == 5.0
        assert report.satisfied[0]
        assert report.feasible
        assert report.system_throughput == 5.0

    def test_matches_bruteforce_recomputation(self):
        cfg = ScenarioConfig()
        rng = np.random.default_rng(31)
        for _ in range(20):
            inst = generate_instance(cfg, rng)
            assignment = rng.integers(0, 4, size=6)
            report = evaluate(inst, assignment)
            thr, satisfied, counts, feasible = reference_evaluate(inst, assignment)
            assert np.allclose(report.throughput_per_ue, thr)
            assert report.satisfied.tolist() == satisfied
            assert report.satisfied_per_service.tolist() == counts
            assert report.feasible == feasible

    def test_dimension_mismatch(self):
        inst = make_instance([[5.0]], qos=[3.0], service_of=[0], min_satisfied=[1])
        with pytest.raises(InvalidParameterError):
            evaluate(inst, np.array([0, 0]))
        with pytest.raises(InvalidParameterError):
            evaluate(inst, np.array([2]))


class TestReward:
    def test_feasible_assignment_earns_throughput(self):
        inst = make_instance([[100.0, 50.0], [30.0, 80.0]], qos=[90.0, 70.0],
                             service_of=[0, 0], min_satisfied=[2])
        assignment = np.array([0, 1])
        report = evaluate(inst, assignment)
        assert report.feasible
        assert reward(inst, assignment) == 180.0

    def test_boundary_equality_counts_as_satisfied(self):
        # throughput exactly at target: step function value 1 at a >= b
        inst = make_instance([[100.0], [0.0]], qos=[100.0, 100.0],
                             service_of=[0, 0], min_satisfied=[1])
        assert reward(inst, np.array([0])) == 100.0

    def test_hand_traced_penalty(self):
        # two UEs, one service, quota 2, throughputs (100, 50) vs targets 100:
        # violation = (50-100)/100 = -0.5, reward = -0.5/150
        inst = make_instance([[100.0, 0.0], [0.0, 50.0]], qos=[100.0, 100.0],
                             service_of=[0, 0], min_satisfied=[2])
        assignment = np.array([0, 1])
        assert reward(inst, assignment) == -0.5 / 150.0
        assert reward(inst, assignment) == reference_reward(inst, assignment)

    def test_zero_throughput_floor(self):
        inst = make_instance(np.zeros((2, 2)), qos=[10.0, 10.0],
                             service_of=[0, 1], min_satisfied=[1, 1])
        assert reward(inst, np.array([0, 0])) == -2.0

    def test_matches_reference_on_random_instances(self):
        cfg = ScenarioConfig()
        rng = np.random.default_rng(77)
        for _ in range(30):
            inst = generate_instance(cfg, rng)
            assignment = rng.integers(0, 4, size=6)
            assert reward(inst, assignment) == reference_reward(inst, assignment)


class TestRewardProperties:
    def test_sign_iff_feasible_small_exhaustive(self):
        rate = np.array([[4.0, 1.0, 0.0],
                         [2.0, 3.0, 1.0],
                         [0.0, 2.0, 5.0]])
        inst = make_instance(rate, qos=[4.0, 3.0, 5.0],
                             service_of=[0, 0, 1], min_satisfied=[1, 1])
        for assignment in itertools.product(range(3), repeat=3):
            a = np.array(assignment)
            report = evaluate(inst, a)
            phi = reward(inst, a)
            if report.system_throughput > 0:
                assert (phi > 0) == report.feasible

    def test_scale_invariance_on_feasible(self):
        inst = make_instance([[100.0, 20.0], [30.0, 80.0]], qos=[90.0, 70.0],
                             service_of=[0, 1], min_satisfied=[1, 1])
        assignment = np.array([0, 1])
        base = reward(inst, assignment)
        assert base > 0
        for c in (0.5, 2.0, 8.0):
            scaled = make_instance(np.asarray(inst.rate) * c,
                                   qos=np.asarray(inst.qos) * c,
                                   service_of=[0, 1], min_satisfied=[1, 1])
            assert reward(scaled, assignment) == pytest.approx(c * base, rel=1e-12)

    def test_penalty_monotone_in_deficit(self):
        # shrinking an unsatisfied UE's throughput can only deepen the violation
        qos = [100.0, 100.0]
        phis = []
        for r in (80.0, 50.0, 20.0, 0.0):
            inst = make_instance([[100.0, 0.0], [0.0, r]], qos=qos,
                                 service_of=[0, 0], min_satisfied=[2])
            phis.append(reward(inst, np.array([0, 1])))
        assert all(a > b for a, b in zip(phis, phis[1:]))

    def test_unsatisfied_ue_in_satisfied_service_contributes_nothing(self):
        # service 0 meets its quota with one of two UEs, so the starving
        # second UE adds no violation; service 1 alone drives the penalty
        inst = make_instance(
            [[100.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 50.0]],
            qos=[100.0, 100.0, 100.0], service_of=[0, 0, 1],
            min_satisfied=[1, 1])
        a = np.array([0, 1, 2])
        # violation only from UE 2: (50-100)/100 = -0.5; total = 160
        assert reward(inst, a) == -0.5 / 160.0


class TestLinearizedFormEquivalence:
    def test_selection_variables_agree_with_direct_check(self):
        # Feasibility via the quota count equals existence of a 0/1
        # selection vector with per-UE throughput covering selected
        # targets: setting rho_ue = [thr >= qos] witnesses both ways.
        cfg = ScenarioConfig()
        rng = np.random.default_rng(5)
        inst = generate_instance(cfg, rng)
        for assignment in itertools.product(range(4), repeat=6):
            a = np.array(assignment)
            report = evaluate(inst, a)
            rho = report.satisfied.astype(int)
            cover_ok = np.all(report.throughput_per_ue >= inst.qos * rho)
            quota_ok = all(
                rho[inst.service_of == svc].sum() >= inst.min_satisfied[svc]
                for svc in range(inst.num_services))
            assert cover_ok
            assert quota_ok == report.feasible
