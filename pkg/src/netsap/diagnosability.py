"""Delay K-diagnosability as a state-pair disambiguation problem.

The plant is refined with one counter per fault class: -1 until a fault of
the class occurs, then the number of events since (the fault itself counts
as 0), saturating at K.  An agent diagnoses in time iff no state with a
saturated counter is confusable, under delayed observations, with a state
whose counter for that class is still -1.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import OverlappingFaultClasses
from .fsa import PairSet, TimedPlant, make_plant, validate_plant
from .observability import conf_pairs, delayed_conf_pairs
from .synthesis import Context


@dataclass(frozen=True)
class FaultSpec:
    classes: tuple  # tuple of frozensets of event ids
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("K must be at least 1")
        seen: set = set()
        for cls in self.classes:
            if seen & set(cls):
                raise OverlappingFaultClasses(f"fault classes share events {sorted(seen & set(cls))}")
            seen |= set(cls)

    @classmethod
    def from_names(cls, model: TimedPlant, classes: Iterable[Iterable[str]], k: int) -> "FaultSpec":
        return cls(tuple(frozenset(model.event_id[e] for e in c) for c in classes), k)


@dataclass(frozen=True)
class RefinedPlant(TimedPlant):
    base_model: TimedPlant
    base: tuple      # refined state -> base state
    counters: tuple  # refined state -> tuple of counters


def update_counters(counters: Sequence[int], event: int, faults: FaultSpec) -> tuple:
    out = []
    for n, cls in zip(counters, faults.classes):
        if n == faults.k or (n == -1 and event not in cls):
            out.append(n)
        else:
            out.append(n + 1)
    return tuple(out)


def _name(model: TimedPlant, x: int, counters: tuple) -> str:
    return f"{model.state_names[x]}:{','.join(map(str, counters))}"


def refine_k_diag(model: TimedPlant, faults: FaultSpec) -> RefinedPlant:
    """Reachable product of ``model`` with the fault counters."""
    start = (model.initial, (-1,) * len(faults.classes))
    index = {start: 0}
    states = [start]
    delta, tmin = {}, {}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        x, n = cur
        for e, y in model.out[x].items():
            nxt = (y, update_counters(n, e, faults))
            if nxt not in index:
                index[nxt] = len(states)
                states.append(nxt)
                queue.append(nxt)
            delta[index[cur], e] = index[nxt]
            tmin[index[cur], e] = model.t_min[x, e]
    refined = RefinedPlant(
        state_names=tuple(_name(model, x, n) for x, n in states),
        event_names=model.event_names,
        observable=model.observable,
        initial=0,
        delta=delta,
        t_min=tmin,
        base_model=model,
        base=tuple(x for x, _ in states),
        counters=tuple(n for _, n in states),
    )
    validate_plant(refined)
    return refined


def add_liveness_loops(model: TimedPlant, event: str = "tau", t_min: int = 1) -> TimedPlant:
    """Self-loops with a fresh unobservable event at every state without successors."""
    if event in model.event_id:
        raise ValueError(f"event name {event!r} already in use")
    names, evs = model.state_names, model.event_names
    trans = [(names[q], evs[e], names[r], model.t_min[q, e]) for (q, e), r in model.delta.items()]
    trans += [(names[q], event, names[q], t_min) for q in model.states if not model.out[q]]
    return make_plant(
        states=names,
        initial=names[model.initial],
        observable=[evs[e] for e in model.events if e in model.observable],
        unobservable=[evs[e] for e in model.events if e not in model.observable] + [event],
        transitions=trans,
    )


def diag_spec(refined: RefinedPlant, faults: FaultSpec) -> PairSet:
    """Pairs where some class has counter K on one side and -1 on the other."""
    out = []
    for i in range(len(faults.classes)):
        done = [q for q in refined.states if refined.counters[q][i] == faults.k]
        clean = [q for q in refined.states if refined.counters[q][i] == -1]
        out.extend((a, b) for a in done for b in clean)
    return PairSet(out)


def lift_policy(refined: RefinedPlant, policy) -> frozenset:
    """Apply a policy over base states to every counter copy."""
    return frozenset((q, e) for q in refined.states for (x, e) in policy if refined.base[q] == x)


def project_policy(refined: RefinedPlant, policy) -> Optional[frozenset]:
    """Base-state form of a refined policy, or ``None`` if counter copies disagree."""
    out = set()
    for x in set(refined.base):
        copies = [q for q in refined.states if refined.base[q] == x]
        for e in refined.observable:
            flags = {(q, e) in policy for q in copies}
            if len(flags) > 1:
                return None
            if flags.pop():
                out.add((x, e))
    return frozenset(out)


@dataclass(frozen=True)
class DiagResult:
    diagnosable: bool
    witnesses: PairSet
    refined: RefinedPlant


def check_delay_k_diag(model: TimedPlant, faults: FaultSpec, bounds, policy, over: str = "refined",
                       refined: RefinedPlant | None = None, ctx: Context | None = None) -> DiagResult:
    """``over="base"`` lifts a policy stated over the original states."""
    if refined is None:
        refined = refine_k_diag(model, faults)
    if over == "base":
        policy = lift_policy(refined, policy)
    elif over != "refined":
        raise ValueError("over must be 'refined' or 'base'")
    if ctx is None:
        ctx = Context(refined, bounds)
    pairs = conf_pairs(ctx.w, policy)
    bad = delayed_conf_pairs(refined, pairs, ctx.bounds.no) & diag_spec(refined, faults)
    return DiagResult(not bad, bad, refined)
