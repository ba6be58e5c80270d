"""Exact assignment solvers: exhaustive enumeration and pruned search.

Both return the assignment maximizing system throughput subject to the
per-service satisfaction quotas, or an infeasible status when no
assignment meets them. With integer-valued rate tables (the default MCS
table) the two objectives agree exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .radio import Instance

OPTIMAL = "optimal-feasible"
INFEASIBLE = "infeasible"

_CHUNK = 65536


@dataclass
class OptResult:
    status: str
    assignment: np.ndarray | None
    objective: float
    nodes_explored: int

    def csv_row(self) -> str:
        a = "" if self.assignment is None else \
            ";".join(str(int(x)) for x in self.assignment)
        return f"{self.status},{self.objective!r},{a},{self.nodes_explored}"


def solve_brute_force(instance: Instance, budget: int = 10 ** 8) -> OptResult:
    """Enumerate all J^N assignments in lexicographic order.

    Ties on the objective are broken by the lexicographically smallest
    rb_owner vector (first occurrence wins under strict improvement).
    """
    j, n = instance.num_ues, instance.num_rbs
    total = j ** n
    if total > budget:
        raise BudgetExceededError(
            f"{j}^{n} = {total} assignments exceed budget {budget}; use solve_pruned")

    place = j ** (n - 1 - np.arange(n))    # digit weights, RB 0 most significant
    best_obj = -np.inf
    best = None
    for start in range(0, total, _CHUNK):
        ks = np.arange(start, min(start + _CHUNK, total))
        owners = (ks[:, None] // place) % j
        rows = np.arange(ks.size)
        thr = np.zeros((ks.size, j))
        for rb in range(n):
            np.add.at(thr, (rows, owners[:, rb]), instance.rate[owners[:, rb], rb])
        satisfied = thr >= instance.qos
        feasible = np.ones(ks.size, dtype=bool)
        for svc in range(instance.num_services):
            counts = satisfied[:, instance.service_of == svc].sum(axis=1)
            feasible &= counts >= instance.min_satisfied[svc]
        if feasible.any():
            objective = thr.sum(axis=1)
            objective[~feasible] = -np.inf
            k = int(np.argmax(objective))
            if objective[k] > best_obj:
                best_obj = float(objective[k])
                best = owners[k].copy()
    if best is None:
        return OptResult(INFEASIBLE, None, -np.inf, total)
    return OptResult(OPTIMAL, best, best_obj, total)


def solve_pruned(instance: Instance) -> OptResult:
    """Depth-first search over RBs with two admissible prunes.

    Bound prune: the current throughput plus the best possible rate of
    every remaining RB cannot beat the incumbent. Reachability prune:
    even granting each needy UE its best remaining RBs (ignoring
    overlaps), the remaining RB budget cannot close the satisfaction
    quotas. Status and objective match solve_brute_force; the returned
    assignment may be any optimum of equal objective.
    """
    rate = instance.rate
    j, n = instance.num_ues, instance.num_rbs
    qos = instance.qos
    service_of = instance.service_of
    quotas = instance.min_satisfied
    num_services = instance.num_services

    # suffix_best[d] = best achievable rate total from RBs d..N-1
    suffix_best = np.zeros(n + 1)
    suffix_best[:n] = np.cumsum(rate.max(axis=0)[::-1])[::-1]
    # top_cums[d][ue] = cumulative sums of UE's rates over RBs d..N-1, largest first
    top_cums = [np.sort(rate[:, d:], axis=1)[:, ::-1].cumsum(axis=1) for d in range(n)]
    service_members = [np.flatnonzero(service_of == svc) for svc in range(num_services)]

    thr = np.zeros(j)
    owners = np.zeros(n, dtype=int)
    counts = np.zeros(num_services, dtype=int)
    state = {"nodes": 0, "best_obj": -np.inf, "best": None}

    def quotas_reachable(depth: int) -> bool:
        budget = n - depth
        needed = 0
        for svc in range(num_services):
            deficit = quotas[svc] - counts[svc]
            if deficit <= 0:
                continue
            if depth == n:
                return False
            costs = []
            for ue in service_members[svc]:
                if thr[ue] >= qos[ue]:
                    continue
                cums = top_cums[depth][ue]
                k = int(np.searchsorted(cums, qos[ue] - thr[ue]))
                if k < cums.size:
                    costs.append(k + 1)
            if len(costs) < deficit:
                return False
            costs.sort()
            needed += sum(costs[:deficit])
            if needed > budget:
                return False
        return True

    def descend(depth: int, running: float):
        state["nodes"] += 1
        if running + suffix_best[depth] <= state["best_obj"]:
            return
        if not quotas_reachable(depth):
            return
        if depth == n:
            obj = float(thr.sum())
            if obj > state["best_obj"]:
                state["best_obj"] = obj
                state["best"] = owners.copy()
            return
        for ue in range(j):
            r = rate[ue, depth]
            owners[depth] = ue
            old = thr[ue]
            was_satisfied = old >= qos[ue]
            thr[ue] = old + r
            if not was_satisfied and thr[ue] >= qos[ue]:
                counts[service_of[ue]] += 1
                descend(depth + 1, running + r)
                counts[service_of[ue]] -= 1
            else:
                descend(depth + 1, running + r)
            thr[ue] = old    # restore, not subtract: exact under float rounding

    descend(0, 0.0)
    if state["best"] is None:
        return OptResult(INFEASIBLE, None, -np.inf, state["nodes"])
    return OptResult(OPTIMAL, state["best"], state["best_obj"], state["nodes"])


def is_feasible(instance: Instance) -> bool:
    """True when at least one assignment satisfies every service quota."""
    return solve_pruned(instance).status == OPTIMAL
