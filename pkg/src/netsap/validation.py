"""Reference semantics by enumeration, a seeded random-walk simulator and a
random plant generator, used to cross-check the symbolic engines."""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .channels import render
from .fsa import Automaton, ExtEvent, Kind, PairSet, TimedPlant, bounded_language, make_plant, step, suffix_truncate
from .observability import info_map


@dataclass
class SimTrace:
    seed: Optional[int]
    mu: list = field(default_factory=list)
    observation: list = field(default_factory=list)
    commands: list = field(default_factory=list)  # command state in force after each step
    states: list = field(default_factory=list)    # communication-automaton labels visited
    seen_counts: list = field(default_factory=list)  # observation length after each step

    def log_lines(self, model: TimedPlant) -> list[str]:
        names = model.event_names
        lines = []
        for i, ev in enumerate(self.mu):
            lab = self.states[i + 1]
            lines.append(
                f"{i}\t{ev.render(names)}\t{render(lab.obs, names)}\t{render(lab.ctrl, names)}"
                f"\t{model.state_names[self.commands[i]]}"
                f"\t{model.spell(self.observation[: self.seen_counts[i]], ' ') or 'ε'}"
            )
        return lines


def simulate_run(comm_aut: Automaton, model: TimedPlant, policy, seed: Optional[int] = None,
                 max_len: int = 20, prefix: Sequence[ExtEvent] = ()) -> SimTrace:
    """Random walk over the communication automaton.

    The walk follows ``prefix`` first and then picks uniformly among enabled
    moves until ``max_len`` steps or a deadlock.
    """
    rng = random.Random(seed)
    trace = SimTrace(seed)
    u, cmd = comm_aut.initial, model.initial
    trace.states.append(comm_aut.labels[u])
    for i in range(max_len):
        out = comm_aut.delta[u]
        if i < len(prefix):
            ev = prefix[i]
            if ev not in out:
                raise ValueError(f"forced event {ev.render(model.event_names)} not enabled at step {i}")
        elif not out:
            break
        else:
            ev = rng.choice(sorted(out))
        if ev.kind is Kind.PLANT and (cmd, ev.event) in policy:
            trace.observation.append(ev.event)
        elif ev.kind is Kind.EXEC:
            cmd = model.delta[cmd, ev.event]
        u = out[ev]
        trace.mu.append(ev)
        trace.commands.append(cmd)
        trace.states.append(comm_aut.labels[u])
        trace.seen_counts.append(len(trace.observation))
    return trace


def brute_force_conf_pairs(model: TimedPlant, policy, comm_aut: Automaton, len_bound: int) -> PairSet:
    """Plant-state pairs reached by extended words with equal observations.

    Enumerates every extended word whose plant projection has at most
    ``len_bound`` events; communication and execution events are not counted
    (the channels bound how many of them can follow each plant event).
    """
    groups = defaultdict(set)
    start = (comm_aut.initial, model.initial, (), 0)
    seen = {start}
    stack = [start]
    while stack:
        u, cmd, obs, n = stack.pop()
        groups[obs].add(comm_aut.labels[u].plant)
        for ev, r in comm_aut.delta[u].items():
            c2, o2, n2 = cmd, obs, n
            if ev.kind is Kind.PLANT:
                if n >= len_bound:
                    continue
                n2 = n + 1
                if (cmd, ev.event) in policy:
                    o2 = obs + (ev.event,)
            elif ev.kind is Kind.EXEC:
                c2 = model.delta[cmd, ev.event]
            nxt = (r, c2, o2, n2)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return _pairs_from_groups(groups.values())


def _pairs_from_groups(groups: Iterable[set]) -> PairSet:
    out = set()
    for g in groups:
        g = sorted(g)
        out.update((a, b) for i, a in enumerate(g) for b in g[i:])
    return PairSet(out)


def brute_force_delayed_overlap(model: TimedPlant, policy, no: int, len_bound: int) -> PairSet:
    """Pairs ``(delta(s), delta(s'))`` whose delayed observation sets intersect."""
    words = sorted(bounded_language(model, len_bound))
    index = defaultdict(set)
    thetas = {}
    for w in words:
        th = {info_map(model, policy, suffix_truncate(w, j)) for j in range(no + 1)}
        thetas[w] = th
        for o in th:
            index[o].add(step(model, model.initial, w))
    out = set()
    for w in words:
        q = step(model, model.initial, w)
        for o in thetas[w]:
            out.update((q, r) for r in index[o])
    return PairSet(out)


def random_plant(rng: random.Random, max_states: int = 5, max_events: int = 4, max_tmin: int = 2,
                 density: float = 0.4, unobservable: int = 1) -> TimedPlant:
    """Small random plant; every state gets at least one outgoing transition
    except possibly the last."""
    n = rng.randint(2, max_states)
    m = rng.randint(2, max_events)
    k = min(unobservable, m - 1)
    events = [chr(ord("a") + i) for i in range(m)]
    states = [str(i) for i in range(n)]
    trans = []
    for q in range(n):
        for e in events:
            if rng.random() < density:
                trans.append((states[q], e, states[rng.randrange(n)], rng.randint(1, max_tmin)))
        if q < n - 1 and not any(t[0] == states[q] for t in trans):
            trans.append((states[q], rng.choice(events), states[q + 1], rng.randint(1, max_tmin)))
    return make_plant(states, states[0], events[: m - k], events[m - k:], trans)


def brute_force_k_diag(model: TimedPlant, fault_classes: Sequence[frozenset], k: int, policy, no: int,
                       len_bound: int) -> set:
    """Violations of delay K-diagnosability among words of length <= ``len_bound``.

    ``policy`` is over the states of ``model``.  Returns triples
    ``(class index, faulty word st, fault-free word u)`` where a fault of the
    class is followed by at least ``k`` events in ``st`` and the delayed
    observation sets of ``st`` and ``u`` intersect.
    """
    words = sorted(bounded_language(model, len_bound))
    thetas = {w: {info_map(model, policy, suffix_truncate(w, j)) for j in range(no + 1)} for w in words}
    out = set()
    for i, cls in enumerate(fault_classes):
        clean = [u for u in words if not any(e in cls for e in u)]
        for w in words:
            first = next((j for j, e in enumerate(w) if e in cls), None)
            if first is None or len(w) - first - 1 < k:
                continue
            out.update((i, w, u) for u in clean if thetas[w] & thetas[u])
    return out


def fault_counters(word: Sequence[int], fault_classes: Sequence[frozenset], k: int) -> tuple:
    """Per class: -1 without a fault, else min(k, events after the first fault)."""
    out = []
    for cls in fault_classes:
        first = next((j for j, e in enumerate(word) if e in cls), None)
        out.append(-1 if first is None else min(k, len(word) - first - 1))
    return tuple(out)
