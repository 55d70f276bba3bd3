"""Observation mappings under transition-based sensor activation policies and
the confusable-pair computations built on them.

A policy is a frozenset of ``(state, event)`` pairs over ``Q x Sigma_o``; the
sensor for ``event`` is on whenever the command in force was issued at
``state``.
"""
from __future__ import annotations

from typing import Callable, Iterable

from .errors import WordNotInLanguage
from .fsa import Automaton, ExtEvent, Kind, PairSet, TimedPlant, reachable_states

Policy = frozenset


def make_policy(model: TimedPlant, entries: Iterable) -> Policy:
    pol = frozenset((int(q), int(e)) for q, e in entries)
    for q, e in pol:
        if q not in model.states:
            raise ValueError(f"policy names unknown state {q}")
        if e not in model.observable:
            raise ValueError(f"policy activates unobservable event {model.event_names[e]!r}")
    return pol


def full_policy(model: TimedPlant, events: Iterable[int] | None = None) -> Policy:
    events = model.observable if events is None else frozenset(events)
    return frozenset((q, e) for q in model.states for e in sorted(events))


def info_map(model: TimedPlant, policy: Policy, word: Iterable[int]) -> tuple:
    """What an agent without delays sees of ``word``."""
    q = model.initial
    seen = []
    for e in word:
        r = model.delta.get((q, e))
        if r is None:
            raise WordNotInLanguage(f"{model.spell(word, ' ')!r} is not generated by the plant")
        if (q, e) in policy:
            seen.append(e)
        q = r
    return tuple(seen)


def p_map(comm_aut: Automaton, model: TimedPlant, policy: Policy, mu: Iterable[ExtEvent]) -> tuple:
    """Observation of an extended word: a plant event is seen iff the command
    in force when it occurs activates it."""
    w = comm_aut.initial
    cmd = model.initial
    seen = []
    for ev in mu:
        nxt = comm_aut.delta[w].get(ev)
        if nxt is None:
            raise WordNotInLanguage(f"{mu!r} is not generated by the communication automaton")
        if ev.kind is Kind.PLANT:
            if (cmd, ev.event) in policy:
                seen.append(ev.event)
        elif ev.kind is Kind.EXEC:
            cmd = model.delta[cmd, ev.event]
        w = nxt
    return tuple(seen)


def confusable_pairs(aut: Automaton, observed: Callable[[int, object], bool]) -> PairSet:
    """Pairs of states reachable by two words with the same observation.

    Pair-product fixpoint: either side may take an unobserved move alone, and
    both sides take an observed event together.
    """
    unobs = []
    obs = []
    for u, out in enumerate(aut.delta):
        lone, seen = [], {}
        for e, r in out.items():
            if observed(u, e):
                seen[e] = r
            else:
                lone.append(r)
        unobs.append(lone)
        obs.append(seen)

    start = (aut.initial, aut.initial)
    found = {start}
    stack = [start]
    while stack:
        u, v = stack.pop()
        nexts = [(r, v) for r in unobs[u]]
        nexts += [(u, r) for r in unobs[v]]
        ov = obs[v]
        if ov:
            for e, r in obs[u].items():
                r2 = ov.get(e)
                if r2 is not None:
                    nexts.append((r, r2))
        for a, b in nexts:
            p = (a, b) if a <= b else (b, a)
            if p not in found:
                found.add(p)
                stack.append(p)
    return PairSet(found)


def w_observed(policy: Policy):
    """Observation predicate on W: plant events seen iff (cmd, event) is active."""
    def observed(labels, u, e):
        return e.kind is Kind.PLANT and (labels[u].cmd, e.event) in policy
    return observed


def w_conf_pairs(w_aut: Automaton, policy: Policy) -> PairSet:
    labels = w_aut.labels
    pred = w_observed(policy)
    return confusable_pairs(w_aut, lambda u, e: pred(labels, u, e))


def project_conf_pairs(w_aut: Automaton, pairs: PairSet) -> PairSet:
    """Plant-state pairs underlying a set of W-state pairs."""
    labels = w_aut.labels
    return PairSet((labels[u].plant, labels[v].plant) for u, v in pairs)


def conf_pairs(w_aut: Automaton, policy: Policy) -> PairSet:
    """Confusable plant-state pairs under ``policy`` with delays (via W)."""
    return project_conf_pairs(w_aut, w_conf_pairs(w_aut, policy))


def plant_conf_pairs(model: TimedPlant, policy: Policy) -> PairSet:
    """Confusable plant-state pairs under the undelayed information mapping."""
    return confusable_pairs(model.as_automaton(), lambda q, e: (q, e) in policy)


def reach_within(model: TimedPlant, q: int, n: int) -> frozenset:
    """States reachable from ``q`` by at most ``n`` events."""
    seen = {q}
    frontier = {q}
    for _ in range(n):
        frontier = {r for p in frontier for r in model.out[p].values()} - seen
        if not frontier:
            break
        seen |= frontier
    return frozenset(seen)


def delayed_conf_pairs(model: TimedPlant, pairs: PairSet, no: int) -> PairSet:
    """Expand each confusable pair by everything reachable within ``no`` events
    on either side."""
    reach = {}

    def r(q):
        if q not in reach:
            reach[q] = reach_within(model, q, no)
        return reach[q]

    out = set()
    for q, q2 in pairs:
        for x in r(q):
            for x2 in r(q2):
                out.add((x, x2))
    return PairSet(out)


def diagonal(model: TimedPlant) -> PairSet:
    return PairSet((q, q) for q in reachable_states(model))


def pair_names(model: TimedPlant, pairs: PairSet, keep_diagonal: bool = False) -> list:
    """Report form: sorted ``[name, name]`` lists, diagonal elided by default."""
    names = model.state_names
    rows = [[names[a], names[b]] for a, b in pairs if keep_diagonal or a != b]
    return sorted(rows)
