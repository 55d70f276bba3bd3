"""Several agents, each with its own observable events, delay bounds and policy.

A vector ``(q, q_1, ..., q_n)`` is jointly confusable when a single word ``s``
reaching ``q`` admits, for every agent ``i``, a word ``s_i`` reaching ``q_i``
whose delayed observation set overlaps that of ``s`` for agent ``i``.
Policies are assumed delay feasible, so observations are computed on plant
words with the undelayed information mapping.
"""
from __future__ import annotations

import dataclasses
import logging
import random
import warnings
from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

from .channels import DelayBounds
from .comm import DEFAULT_STATE_CAP
from .errors import HorizonTooSmallWarning, SpecUnsatisfiableEvenFullyActivated, StateExplosion
from .fsa import TimedPlant, bounded_language, step, suffix_truncate
from .observability import full_policy, info_map, reach_within
from .synthesis import Context, _picker, max_feasible_subpolicy, Order

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AgentProfile:
    id: int
    observable: frozenset
    bounds: DelayBounds

    @property
    def no(self) -> int:
        return self.bounds.no


def make_agents(model: TimedPlant, rows) -> list[AgentProfile]:
    """Agents from ``{"id", "observable": [names], "no", "nc"}`` records,
    given as a list or under an ``"agents"`` key."""
    if isinstance(rows, dict):
        rows = rows["agents"]
    out = []
    for i, row in enumerate(rows):
        obs = frozenset(model.event_id[e] for e in row.get("observable", []))
        if not obs <= model.observable:
            raise ValueError(f"agent {row.get('id', i)} observes events outside the observable set")
        out.append(AgentProfile(row.get("id", i), obs, DelayBounds(row["no"], row["nc"]).check()))
    return out


def agent_view(model: TimedPlant, agent: AgentProfile) -> TimedPlant:
    """The plant as seen by one agent: only its own events are observable."""
    return dataclasses.replace(model, observable=frozenset(agent.observable))


def full_vector(model: TimedPlant, agents: Sequence[AgentProfile]) -> tuple:
    return tuple(full_policy(model, a.observable) for a in agents)


@dataclass(frozen=True)
class JointResult:
    disjoint: bool
    witnesses: frozenset


def _agent_moves(model, policy, events):
    """Per-state (observed, unobserved) successor maps for one agent."""
    seen, lone = [], []
    for q in model.states:
        s, u = {}, []
        for e, r in model.out[q].items():
            if e in events and (q, e) in policy:
                s[e] = r
            else:
                u.append(r)
        seen.append(s)
        lone.append(u)
    return seen, lone


def joint_product_states(model: TimedPlant, agents: Sequence[AgentProfile], policies: Sequence,
                         max_states: int = DEFAULT_STATE_CAP) -> set:
    """Reachable states ``(q, ((p_u, pending, p_i), ...))`` of the joint product.

    ``q`` follows the true word; for agent ``i``, ``p_u`` is the state after
    the prefix already matched, ``pending`` the later events of the true
    word, and ``p_i`` the state of the agent's ghost word.  A queue may hold
    ``N_o,i + 1`` events only until its front is matched; the true word cannot
    move on before that.
    """
    tables = [_agent_moves(model, pol, a.observable) for a, pol in zip(agents, policies)]
    bounds = [a.no for a in agents]

    def close(i, comp):
        """All agent-i components reachable by consuming / ghost moves alone."""
        seen_t, lone_t = tables[i]
        out = {comp}
        todo = [comp]
        while todo:
            pu, pend, pi = todo.pop()
            nxt = [(pu, pend, r) for r in lone_t[pi]]
            if pend:
                e, rest = pend[0], pend[1:]
                ru = model.delta[pu, e]
                if e in seen_t[pu]:
                    r = seen_t[pi].get(e)
                    if r is not None:
                        nxt.append((ru, rest, r))
                else:
                    nxt.append((ru, rest, pi))
            for c in nxt:
                if c not in out:
                    out.add(c)
                    todo.append(c)
        return out

    start = (model.initial, tuple((model.initial, (), model.initial) for _ in agents))
    found = {start}
    queue = deque([start])

    def push(s):
        if s not in found:
            found.add(s)
            if len(found) > max_states:
                raise StateExplosion(max_states)
            queue.append(s)

    while queue:
        q, comps = queue.popleft()
        for i, c in enumerate(comps):
            for c2 in close(i, c):
                if c2 != c:
                    push((q, comps[:i] + (c2,) + comps[i + 1:]))
        if all(len(c[1]) <= n for c, n in zip(comps, bounds)):
            for e, r in model.out[q].items():
                push((r, tuple((pu, pend + (e,), pi) for pu, pend, pi in comps)))
    return found


def joint_conf_product(model, agents, policies, max_states: int = DEFAULT_STATE_CAP) -> set:
    """All jointly confusable vectors, via the product engine."""
    out = set()
    reach: dict = {}
    for q, comps in joint_product_states(model, agents, policies, max_states):
        if any(len(c[1]) > a.no for c, a in zip(comps, agents)):
            continue
        options = []
        for a, (_, _, pi) in zip(agents, comps):
            key = (pi, a.no)
            if key not in reach:
                reach[key] = reach_within(model, pi, a.no)
            options.append(reach[key])
        out.update((q,) + rest for rest in product(*options))
    return out


def _theta_sets(model, policy, events, word, no):
    pol = frozenset((q, e) for q, e in policy if e in events)
    return {info_map(model, pol, suffix_truncate(word, j)) for j in range(no + 1)}


def joint_conf_brute(model, agents, policies, horizon: int = 8) -> set:
    """All jointly confusable vectors witnessed by words of length <= ``horizon``."""
    words = bounded_language(model, horizon)
    if any(len(w) == horizon and model.out[step(model, model.initial, w)] for w in words):
        warnings.warn(f"language not exhausted at horizon {horizon}", HorizonTooSmallWarning, stacklevel=2)
    words = sorted(words)
    end = {w: step(model, model.initial, w) for w in words}
    thetas = []
    index = []
    for a, pol in zip(agents, policies):
        th = {w: _theta_sets(model, pol, a.observable, w, a.no) for w in words}
        idx: dict = {}
        for w, obs in th.items():
            for o in obs:
                idx.setdefault(o, set()).add(end[w])
        thetas.append(th)
        index.append(idx)
    out = set()
    for w in words:
        options = []
        for th, idx in zip(thetas, index):
            options.append(set().union(*(idx[o] for o in th[w])))
        out.update((end[w],) + rest for rest in product(*options))
    return out


def joint_conf_check(model: TimedPlant, agents: Sequence[AgentProfile], policies: Sequence, spec,
                     horizon: int = 8, engine: str = "product",
                     max_states: int = DEFAULT_STATE_CAP) -> JointResult:
    """Whether no jointly confusable vector lies in ``spec``.

    ``engine="product"`` is exact; ``engine="brute"`` enumerates words up to
    ``horizon`` and warns when that does not cover the language.
    """
    spec = frozenset(tuple(t) for t in spec)
    if not spec:
        return JointResult(True, frozenset())
    if engine == "product":
        conf = joint_conf_product(model, agents, policies, max_states)
    elif engine == "brute":
        conf = joint_conf_brute(model, agents, policies, horizon)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    bad = frozenset(conf & spec)
    return JointResult(not bad, bad)


def minimize_decentralized(model: TimedPlant, agents: Sequence[AgentProfile], spec, order: Order = "desc",
                           seed: Optional[int] = None, engine: str = "product", horizon: int = 8,
                           enabled_only: bool = False) -> tuple:
    """Agent-by-agent greedy deletion.

    Agents are visited in list order, or in a shuffled order when ``seed`` is
    given.  Within an agent, candidates are picked as in :func:`minimize_sap`
    and each deletion is repaired to that agent's maximal feasible subpolicy.
    """
    spec = frozenset(tuple(t) for t in spec)
    vec = list(full_vector(model, agents))

    def ok(v):
        return joint_conf_check(model, agents, v, spec, horizon, engine).disjoint

    if not ok(vec):
        raise SpecUnsatisfiableEvenFullyActivated("a required vector stays confusable with every sensor of every agent on")
    visit = list(range(len(agents)))
    if seed is not None:
        random.Random(seed).shuffle(visit)
    pick = _picker(order)
    for i in visit:
        view = agent_view(model, agents[i])
        ctx = Context(view, agents[i].bounds, enabled_only=enabled_only)
        kept: set = set()
        while vec[i] - kept:
            cand = pick(vec[i] - kept)
            sub, _ = max_feasible_subpolicy(view, agents[i].bounds, vec[i] - {cand}, ctx=ctx)
            trial = vec[:i] + [sub] + vec[i + 1:]
            if ok(trial):
                vec = trial
            else:
                kept.add(cand)
            log.debug("agent %s candidate %s accepted=%s", agents[i].id, cand, vec[i] is sub)
    return tuple(vec)
