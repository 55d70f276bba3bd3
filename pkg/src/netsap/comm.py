"""The communication automaton: plant dynamics composed with both channels.

States are ``(q, obs, ctrl)``.  A plant event sigma moves the plant and ages
both channels, a communication event h(sigma) moves the front occurrence from
the observation channel into the control channel, and an execution event
g(sigma) retires the front pending command.

The refinement ``W`` adds a fourth component tracking the plant state reached
by the executed commands, i.e. the state whose activation decision is in force.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple

from . import channels as ch
from .channels import DelayBounds
from .errors import StateExplosion
from .fsa import Automaton, ExtEvent, Kind, TimedPlant, comm, exe, parallel_compose, plant, relabel_exec

DEFAULT_STATE_CAP = 5_000_000


class CommState(NamedTuple):
    plant: int
    obs: tuple
    ctrl: tuple


class WState(NamedTuple):
    plant: int
    obs: tuple
    ctrl: tuple
    cmd: int  # state reached by the string whose command is in force


def build_comm(model: TimedPlant, bounds: DelayBounds, max_states: int = DEFAULT_STATE_CAP) -> Automaton:
    bounds = DelayBounds(*bounds).check()
    start = CommState(model.initial, ch.EMPTY, ch.EMPTY)
    index = {start: 0}
    labels = [start]
    delta = []
    queue = deque([start])
    while queue:
        q, obs, ctrl = queue.popleft()
        moves = []
        for e, r in model.out[q].items():
            o2 = ch.in_obs(obs, q, e, model, bounds.no)
            if o2 is None:
                continue
            c2 = ch.plus(ctrl, q, e, model, bounds.nc)
            if c2 is None:
                continue
            moves.append((plant(e), CommState(r, o2, c2)))
        if obs:
            e = obs[0][0]
            moves.append((comm(e), CommState(q, obs[1:], ch.in_ctr(ctrl, e))))
        if ctrl:
            e = ctrl[0][0]
            moves.append((exe(e), CommState(q, obs, ctrl[1:])))
        out = {}
        for ev, nxt in moves:
            j = index.get(nxt)
            if j is None:
                if len(labels) >= max_states:
                    raise StateExplosion(max_states)
                j = index[nxt] = len(labels)
                labels.append(nxt)
                queue.append(nxt)
            out[ev] = j
        delta.append(out)
    alphabet = frozenset(f(e) for e in model.events for f in (plant, comm, exe))
    return Automaton(tuple(labels), alphabet, 0, tuple(delta))


def build_w(model: TimedPlant, bounds: DelayBounds, comm_aut: Automaton | None = None,
            max_states: int = DEFAULT_STATE_CAP) -> Automaton:
    """``W = G~ || G^g``; labels are :class:`WState`."""
    if comm_aut is None:
        comm_aut = build_comm(model, bounds, max_states)
    prod = parallel_compose(comm_aut, relabel_exec(model))
    labels = tuple(WState(c.plant, c.obs, c.ctrl, x) for c, x in prod.labels)
    return Automaton(labels, prod.alphabet, prod.initial, prod.delta)


def psi(mu: Iterable[ExtEvent]) -> tuple:
    """Plant events of ``mu`` in order."""
    return tuple(e.event for e in mu if e.kind is Kind.PLANT)


def effective_command_string(mu: Iterable[ExtEvent]) -> tuple:
    """g^-1 of the executed-command events of ``mu``."""
    return tuple(e.event for e in mu if e.kind is Kind.EXEC)


def parse_ext_word(model: TimedPlant, text: str) -> tuple:
    """Read words like ``"b f h(b) g(b)"`` into extended events."""
    word = []
    for tok in text.split():
        if tok.startswith("h(") and tok.endswith(")"):
            word.append(comm(model.event_id[tok[2:-1]]))
        elif tok.startswith("g(") and tok.endswith(")"):
            word.append(exe(model.event_id[tok[2:-1]]))
        else:
            word.append(plant(model.event_id[tok]))
    return tuple(word)
