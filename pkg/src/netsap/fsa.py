"""Deterministic automata, timed plant models and the string utilities used
by every other module.

Plant states and events are interned to dense integer ids; display names are
kept on the :class:`TimedPlant` for I/O.  Derived automata (the communication
automaton, its refinement, products) use the generic :class:`Automaton`, whose
events are arbitrary hashable labels.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence

from .errors import (
    DuplicateTransition,
    NoInitialState,
    UnknownStateOrEvent,
    ZeroOccurringTime,
)


class Kind(IntEnum):
    PLANT = 0
    COMM = 1  # h(sigma): occurrence delivered to the agent
    EXEC = 2  # g(sigma): command issued after h(sigma) executed


class ExtEvent(NamedTuple):
    kind: Kind
    event: int

    def render(self, names: Sequence[str]) -> str:
        name = names[self.event]
        if self.kind is Kind.PLANT:
            return name
        return f"{'h' if self.kind is Kind.COMM else 'g'}({name})"


def plant(e: int) -> ExtEvent:
    return ExtEvent(Kind.PLANT, e)


def comm(e: int) -> ExtEvent:
    return ExtEvent(Kind.COMM, e)


def exe(e: int) -> ExtEvent:
    return ExtEvent(Kind.EXEC, e)


@dataclass(frozen=True)
class Automaton:
    """Deterministic automaton over hashable event labels.

    ``delta[q]`` maps an event to the successor of state ``q``; ``labels[q]``
    is the display label (any hashable) of state ``q``.
    """

    labels: tuple
    alphabet: frozenset
    initial: int
    delta: tuple  # tuple[dict[event, int], ...]

    def __len__(self) -> int:
        return len(self.labels)

    def step(self, state: int, word: Iterable[Hashable]) -> Optional[int]:
        for e in word:
            state = self.delta[state].get(e)
            if state is None:
                return None
        return state

    def transitions(self) -> Iterator[tuple[int, Hashable, int]]:
        for q, out in enumerate(self.delta):
            for e, r in out.items():
                yield q, e, r

    @cached_property
    def index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}


@dataclass(frozen=True)
class TimedPlant:
    """Deterministic plant with a minimum occurring time on each transition."""

    state_names: tuple
    event_names: tuple
    observable: frozenset
    initial: int
    delta: Mapping = field(repr=False)  # (state, event) -> state
    t_min: Mapping = field(repr=False)  # (state, event) -> int >= 1

    @property
    def states(self) -> range:
        return range(len(self.state_names))

    @property
    def events(self) -> range:
        return range(len(self.event_names))

    @property
    def unobservable(self) -> frozenset:
        return frozenset(self.events) - self.observable

    @cached_property
    def out(self) -> tuple:
        """Per-state successor maps, events in ascending id order."""
        table = [dict() for _ in self.states]
        for (q, e), r in sorted(self.delta.items()):
            table[q][e] = r
        return tuple(table)

    @cached_property
    def state_id(self) -> dict:
        return {n: i for i, n in enumerate(self.state_names)}

    @cached_property
    def event_id(self) -> dict:
        return {n: i for i, n in enumerate(self.event_names)}

    def word(self, names: Iterable[str] | str) -> tuple:
        """Event ids for a word; a plain string is read one character per event."""
        return tuple(self.event_id[n] for n in names)

    def spell(self, word: Iterable[int], sep: str = "") -> str:
        return sep.join(self.event_names[e] for e in word)

    def as_automaton(self) -> Automaton:
        return Automaton(
            labels=tuple(self.states),
            alphabet=frozenset(self.events),
            initial=self.initial,
            delta=tuple(dict(d) for d in self.out),
        )


def make_plant(states, initial, observable, unobservable, transitions) -> TimedPlant:
    """Build and validate a plant from display names.

    ``transitions`` is an iterable of ``(from, event, to, t_min)`` tuples.
    """
    states = list(states)
    if initial is None:
        raise NoInitialState("model has no initial state")
    events = list(observable) + [e for e in unobservable if e not in observable]
    sid = {n: i for i, n in enumerate(states)}
    eid = {n: i for i, n in enumerate(events)}
    if len(sid) != len(states) or len(eid) != len(events):
        raise UnknownStateOrEvent("state or event names are not unique")
    if initial not in sid:
        raise NoInitialState(f"initial state {initial!r} is not a declared state")
    delta, tmin = {}, {}
    for src, ev, dst, t in transitions:
        for name, table in ((src, sid), (dst, sid), (ev, eid)):
            if name not in table:
                raise UnknownStateOrEvent(f"undeclared name {name!r}")
        key = (sid[src], eid[ev])
        if key in delta:
            raise DuplicateTransition(f"second transition for ({src}, {ev})")
        delta[key] = sid[dst]
        tmin[key] = t
    model = TimedPlant(
        state_names=tuple(states),
        event_names=tuple(events),
        observable=frozenset(eid[e] for e in observable),
        initial=sid[initial],
        delta=delta,
        t_min=tmin,
    )
    return validate_plant(model)


def validate_plant(model: TimedPlant) -> TimedPlant:
    n, m = len(model.state_names), len(model.event_names)
    if not 0 <= model.initial < n:
        raise NoInitialState(f"initial state id {model.initial} out of range")
    if not model.observable <= frozenset(range(m)):
        raise UnknownStateOrEvent("observable events must be declared events")
    if set(model.delta) != set(model.t_min):
        raise UnknownStateOrEvent("t_min must be defined exactly on the transitions")
    for (q, e), r in model.delta.items():
        if not (0 <= q < n and 0 <= r < n and 0 <= e < m):
            raise UnknownStateOrEvent(f"transition ({q}, {e}) -> {r} out of range")
        t = model.t_min[q, e]
        if not isinstance(t, int) or t < 1:
            raise ZeroOccurringTime(
                f"t_min({model.state_names[q]}, {model.event_names[e]}) = {t!r}; must be >= 1"
            )
    return model


def step(model, state: int, word: Iterable[int]) -> Optional[int]:
    """Extended transition function; ``None`` when some step is undefined."""
    if isinstance(model, TimedPlant):
        for e in word:
            state = model.delta.get((state, e))
            if state is None:
                return None
        return state
    return model.step(state, word)


def reachable_states(model: TimedPlant) -> list[int]:
    seen = {model.initial}
    order = [model.initial]
    for q in order:
        for r in model.out[q].values():
            if r not in seen:
                seen.add(r)
                order.append(r)
    return order


def _as_automaton(a) -> Automaton:
    return a.as_automaton() if isinstance(a, TimedPlant) else a


def parallel_compose(a, b) -> Automaton:
    """Synchronous product: shared events synchronize, private events interleave.

    Only the reachable part is built; state labels are ``(label_a, label_b)``.
    """
    a, b = _as_automaton(a), _as_automaton(b)
    shared = a.alphabet & b.alphabet
    start = (a.initial, b.initial)
    index = {start: 0}
    pairs = [start]
    delta = []
    queue = deque([start])
    while queue:
        qa, qb = queue.popleft()
        out = {}
        moves = []
        for e, ra in a.delta[qa].items():
            if e in shared:
                rb = b.delta[qb].get(e)
                if rb is not None:
                    moves.append((e, (ra, rb)))
            else:
                moves.append((e, (ra, qb)))
        for e, rb in b.delta[qb].items():
            if e not in shared:
                moves.append((e, (qa, rb)))
        for e, nxt in moves:
            j = index.get(nxt)
            if j is None:
                j = index[nxt] = len(pairs)
                pairs.append(nxt)
                queue.append(nxt)
            out[e] = j
        delta.append(out)
    labels = tuple((a.labels[x], b.labels[y]) for x, y in pairs)
    return Automaton(labels, a.alphabet | b.alphabet, 0, tuple(delta))


def bounded_language(a, k: int) -> set[tuple]:
    """All words of length <= k generated from the initial state."""
    if k < 0:
        raise ValueError("k must be non-negative")
    a = _as_automaton(a)
    words = {()}
    frontier = [((), a.initial)]
    for _ in range(k):
        nxt = []
        for w, q in frontier:
            for e, r in a.delta[q].items():
                nxt.append((w + (e,), r))
        if not nxt:
            break
        words.update(w for w, _ in nxt)
        frontier = nxt
    return words


def relabel_exec(model) -> Automaton:
    """Copy of ``model`` with every event sigma replaced by g(sigma)."""
    a = _as_automaton(model)
    if any(isinstance(e, ExtEvent) for e in a.alphabet):
        raise ValueError("relabel_exec expects plant events; got an already relabelled automaton")
    return Automaton(
        labels=a.labels,
        alphabet=frozenset(exe(e) for e in a.alphabet),
        initial=a.initial,
        delta=tuple({exe(e): r for e, r in out.items()} for out in a.delta),
    )


def suffix_truncate(word: Sequence, i: int) -> tuple:
    """Drop the last ``min(i, len(word))`` symbols."""
    if i < 0:
        raise ValueError("i must be non-negative")
    return tuple(word[: max(0, len(word) - i)])


def _norm(pair) -> tuple:
    a, b = pair
    return (a, b) if a <= b else (b, a)


class PairSet:
    """Immutable set of unordered state pairs, stored as ``(min, max)``."""

    __slots__ = ("_pairs",)

    def __init__(self, pairs: Iterable = ()):
        self._pairs = frozenset(_norm(p) for p in pairs)

    def __contains__(self, pair) -> bool:
        return _norm(pair) in self._pairs

    def __iter__(self):
        return iter(sorted(self._pairs))

    def __len__(self) -> int:
        return len(self._pairs)

    def __eq__(self, other) -> bool:
        if isinstance(other, PairSet):
            return self._pairs == other._pairs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._pairs)

    def __or__(self, other: "PairSet") -> "PairSet":
        return PairSet(self._pairs | PairSet(other)._pairs)

    def __and__(self, other) -> "PairSet":
        return PairSet(self._pairs & PairSet(other)._pairs)

    def __le__(self, other: "PairSet") -> bool:
        return self._pairs <= PairSet(other)._pairs

    def __repr__(self) -> str:
        return f"PairSet({sorted(self._pairs)})"

    def isdisjoint(self, other) -> bool:
        return self._pairs.isdisjoint(PairSet(other)._pairs)

    def off_diagonal(self) -> "PairSet":
        return PairSet(p for p in self._pairs if p[0] != p[1])

    def partners(self) -> dict:
        """state -> set of states it is paired with (both directions)."""
        table: dict = {}
        for a, b in self._pairs:
            table.setdefault(a, set()).add(b)
            table.setdefault(b, set()).add(a)
        return table
