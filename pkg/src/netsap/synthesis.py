"""Delay feasibility, maximal delay-feasible subpolicies and greedy
minimization of transition-based sensor activation policies.

Feasibility has two parts.  *Command consistency*: whenever an event can occur
at plant state ``q`` while the command issued at ``x`` is in force, ``(q, e)``
and ``(x, e)`` must agree.  *Observation consistency*: two plant states the
agent may confuse must agree on every observable event.  With
``enabled_only=True`` the second condition is weakened to events enabled at
both states of the pair.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .channels import DelayBounds
from .comm import build_w
from .errors import SpecUnsatisfiableEvenFullyActivated
from .fsa import Automaton, Kind, PairSet, TimedPlant
from .observability import Policy, conf_pairs, delayed_conf_pairs, full_policy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cond1:
    """An event enabled at plant state ``w_state.plant`` while the command from
    ``w_state.cmd`` is in force, with the two policy entries disagreeing."""
    w_state: tuple
    event: int


@dataclass(frozen=True)
class Cond2:
    pair: tuple
    event: int


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple = ()

    @property
    def feasible(self) -> bool:
        return not self.violations


@dataclass
class Iteration:
    candidate: tuple
    result_size: int
    accepted: bool


@dataclass
class SynthesisTrace:
    iterations: list = field(default_factory=list)

    def to_json(self, model: TimedPlant) -> list:
        return [
            {
                "candidate": [model.state_names[it.candidate[0]], model.event_names[it.candidate[1]]],
                "result_size": it.result_size,
                "accepted": it.accepted,
            }
            for it in self.iterations
        ]


class Context:
    """Policy-independent data for one (model, bounds): W and its enabling triples."""

    def __init__(self, model: TimedPlant, bounds, w_aut: Optional[Automaton] = None, enabled_only: bool = False):
        self.model = model
        self.bounds = DelayBounds(*bounds)
        self.w = w_aut if w_aut is not None else build_w(model, self.bounds)
        self.enabled_only = enabled_only
        # (plant, cmd, event) -> a witness W state where the event is enabled
        triples = {}
        for u, out in enumerate(self.w.delta):
            lab = self.w.labels[u]
            for ev in out:
                if ev.kind is Kind.PLANT and ev.event in model.observable:
                    triples.setdefault((lab.plant, lab.cmd, ev.event), lab)
        self.triples = triples

    def shared_events(self, q: int, q2: int) -> Iterable[int]:
        """Events whose activation must agree between confusable ``q`` and ``q2``."""
        if not self.enabled_only:
            return sorted(self.model.observable)
        a, b = self.model.out[q], self.model.out[q2]
        return [e for e in a if e in b and e in self.model.observable]

    def conf(self, policy: Policy) -> PairSet:
        return conf_pairs(self.w, policy)


def _context(model, bounds, ctx, enabled_only=False) -> Context:
    if ctx is not None:
        return ctx
    return Context(model, bounds, enabled_only=enabled_only)


def check_delay_feasible(model: TimedPlant, bounds, policy: Policy, ctx: Context | None = None,
                         enabled_only: bool = False) -> FeasibilityReport:
    ctx = _context(model, bounds, ctx, enabled_only)
    bad = []
    for (q, x, e), lab in sorted(ctx.triples.items()):
        if ((q, e) in policy) != ((x, e) in policy):
            bad.append(Cond1(lab, e))
    for q, q2 in ctx.conf(policy):
        if q == q2:
            continue
        for e in ctx.shared_events(q, q2):
            if ((q, e) in policy) != ((q2, e) in policy):
                bad.append(Cond2((q, q2), e))
    return FeasibilityReport(tuple(bad))


def _violators(ctx: Context, policy: Policy, pairs: PairSet) -> set:
    out = set()
    for (q, x, e) in ctx.triples:
        inq, inx = (q, e) in policy, (x, e) in policy
        if inq and not inx:
            out.add((q, e))  # plant side active, command in force is not
        elif inx and not inq:
            out.add((x, e))  # command side active, plant side is not
    for q, q2 in pairs:
        if q == q2:
            continue
        for e in ctx.shared_events(q, q2):
            a, b = (q, e) in policy, (q2, e) in policy
            if a and not b:
                out.add((q, e))
            elif b and not a:
                out.add((q2, e))
    return out


def max_feasible_subpolicy(model: TimedPlant, bounds, policy: Policy, ctx: Context | None = None,
                           enabled_only: bool = False) -> tuple[Policy, PairSet]:
    """Largest delay-feasible subset of ``policy`` and its confusable pairs.

    Every violating entry is removed in each pass, until nothing changes.
    """
    ctx = _context(model, bounds, ctx, enabled_only)
    policy = frozenset(policy)
    while True:
        pairs = ctx.conf(policy)
        bad = _violators(ctx, policy, pairs)
        if not bad:
            return policy, pairs
        policy = policy - bad


Order = Union[str, Sequence[tuple], Callable]


def _picker(order: Order):
    if callable(order):
        return order
    if order == "desc":
        return lambda cands: max(cands)
    if order == "asc":
        return lambda cands: min(cands)
    preferred = list(order)

    def pick(cands):
        for c in preferred:
            if c in cands:
                return c
        return max(cands)
    return pick


def satisfies(ctx: Context, pairs: PairSet, spec: PairSet) -> bool:
    return delayed_conf_pairs(ctx.model, pairs, ctx.bounds.no).isdisjoint(spec)


def minimize_sap(model: TimedPlant, bounds, spec: PairSet, order: Order = "desc",
                 ctx: Context | None = None, enabled_only: bool = False) -> tuple[Policy, SynthesisTrace]:
    """Greedy deletion of policy entries starting from full activation.

    ``order`` is ``"desc"`` / ``"asc"`` over ``(state, event)`` ids, an
    explicit preference list (falling back to descending), or a callable
    choosing from the remaining candidates.
    """
    ctx = _context(model, bounds, ctx, enabled_only)
    spec = PairSet(spec)
    policy = full_policy(model)
    if not satisfies(ctx, ctx.conf(policy), spec):
        raise SpecUnsatisfiableEvenFullyActivated("a required pair stays confusable with every sensor on")
    pick = _picker(order)
    kept: set = set()
    trace = SynthesisTrace()
    while policy - kept:
        cand = pick(policy - kept)
        sub, pairs = max_feasible_subpolicy(model, bounds, policy - {cand}, ctx=ctx)
        ok = satisfies(ctx, pairs, spec)
        trace.iterations.append(Iteration(cand, len(sub), ok))
        log.debug("candidate %s -> |sub|=%d accepted=%s", cand, len(sub), ok)
        if ok:
            policy = sub
        else:
            kept.add(cand)
    return policy, trace
