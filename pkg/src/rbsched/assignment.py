"""Assignment evaluation and the shaped reward.

An assignment is a length-N integer vector ``rb_owner`` where
``rb_owner[n] = j`` gives RB n to UE j. Every RB is owned by exactly one
UE, which encodes the exclusive-allocation constraints of the problem.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .radio import Instance


@dataclass
class SatisfactionReport:
    """Per-UE throughputs and the satisfaction bookkeeping for one assignment."""

    throughput_per_ue: np.ndarray    # (J,) bits/s
    satisfied: np.ndarray            # (J,) bool, throughput >= target
    satisfied_per_service: np.ndarray  # (L,) int
    feasible: bool

    @property
    def system_throughput(self) -> float:
        return float(self.throughput_per_ue.sum())

    def csv_row(self) -> str:
        flags = "".join("1" if s else "0" for s in self.satisfied)
        tp = ";".join(repr(t) for t in self.throughput_per_ue)
        return f"{tp},{flags},{int(self.feasible)}"


def validate_assignment(instance: Instance, assignment) -> np.ndarray:
    a = np.asarray(assignment)
    if a.shape != (instance.num_rbs,):
        raise InvalidParameterError(
            f"assignment has shape {a.shape}, expected ({instance.num_rbs},)")
    if a.dtype.kind not in "iu":
        raise InvalidParameterError("assignment entries must be integer UE indices")
    if a.size and (a.min() < 0 or a.max() >= instance.num_ues):
        raise InvalidParameterError("assignment entries must lie in [0, num_ues)")
    return a


def evaluate(instance: Instance, assignment) -> SatisfactionReport:
    """Throughput per UE, satisfaction flags, and feasibility of one assignment.

    UE j is satisfied when its summed rate meets its target (ties count as
    satisfied); the assignment is feasible when every service reaches its
    minimum satisfied-UE quota.
    """
    a = validate_assignment(instance, assignment)
    throughput = np.bincount(a, weights=instance.rate[a, np.arange(instance.num_rbs)],
                             minlength=instance.num_ues)
    satisfied = throughput >= instance.qos
    counts = np.bincount(instance.service_of[satisfied],
                         minlength=instance.num_services)
    feasible = bool(np.all(counts >= instance.min_satisfied))
    return SatisfactionReport(throughput_per_ue=throughput, satisfied=satisfied,
                              satisfied_per_service=counts, feasible=feasible)


def shaped_reward(instance: Instance, report: SatisfactionReport) -> float:
    """Reward of an already-evaluated assignment.

    Feasible assignments earn the system throughput. Otherwise a
    violation score accumulates the relative throughput deficits
    (r - target)/target of unsatisfied UEs, counting only services whose
    quota is missed, and the reward becomes violation / throughput.

    When the violating assignment carries zero total throughput the
    quotient is undefined; we return the floor penalty -(sum of quotas),
    the worst value the violation score can reach, so that rewards still
    rank by violation severity.
    """
    total = report.system_throughput
    violation = 0.0
    for svc in range(instance.num_services):
        if report.satisfied_per_service[svc] < instance.min_satisfied[svc]:
            in_service = instance.service_of == svc
            deficit = ~report.satisfied & in_service
            r = report.throughput_per_ue[deficit]
            q = instance.qos[deficit]
            violation += float(((r - q) / q).sum())
    if violation < 0.0:
        if total == 0.0:
            return -float(instance.min_satisfied.sum())
        return violation / total
    return total


def reward(instance: Instance, assignment) -> float:
    """Shaped reward of an assignment; positive iff it is feasible
    (given any positive rate in play)."""
    return shaped_reward(instance, evaluate(instance, assignment))
