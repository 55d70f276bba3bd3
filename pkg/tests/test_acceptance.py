"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line naming every sub-check, then
asserts all of them together with the stated time limit.
"""
import random
import time
import warnings
from collections import deque


from netsap import channels as ch
from netsap.channels import DelayBounds
from netsap.comm import CommState, build_comm, build_w
from netsap.decentralized import AgentProfile, agent_view, joint_conf_check, minimize_decentralized
from netsap.diagnosability import FaultSpec, check_delay_k_diag, diag_spec, lift_policy, refine_k_diag
from netsap.errors import HorizonTooSmallWarning
from netsap.fsa import Kind, PairSet, bounded_language, comm, plant
from netsap.observability import conf_pairs, delayed_conf_pairs, full_policy, info_map, p_map
from netsap.synthesis import Context, check_delay_feasible, max_feasible_subpolicy, minimize_sap, satisfies
from netsap.validation import brute_force_conf_pairs, random_plant

from conftest import names, policy


def report(capsys, number, title, checks, elapsed, limit):
    checks = dict(checks)
    checks[f"runtime {elapsed:.2f}s < {limit}s"] = elapsed < limit
    failed = [k for k, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    detail = "all sub-checks hold" if not failed else "failed: " + "; ".join(failed)
    with capsys.disabled():
        print(f"\n[{status}] criterion {number} ({title}): {detail}")
    assert not failed, failed


def projected_language(aut, k):
    """Plant projections of all extended words with at most k plant events."""
    start = (aut.initial, ())
    seen = {start}
    todo = deque([start])
    while todo:
        u, w = todo.popleft()
        for ev, r in aut.delta[u].items():
            if ev.kind is Kind.PLANT:
                if len(w) >= k:
                    continue
                nxt = (r, w + (ev.event,))
            else:
                nxt = (r, w)
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return {w for _, w in seen}


def test_criterion_1_channel_operators(capsys, toy):
    t0 = time.perf_counter()
    ev = toy.event_id
    c = lambda *xs: tuple((ev[e], n) for e, n in xs)
    checks = {
        "in_obs((b,0),2,f)=(b,1)(f,0)": ch.in_obs(c(("b", 0)), 2, ev["f"], toy, 1) == c(("b", 1), ("f", 0)),
        "out_obs((b,1)(f,0),b)=(f,0)": ch.out_obs(c(("b", 1), ("f", 0)), ev["b"]) == c(("f", 0)),
        "plus((b,0),2,f)=(b,1)": ch.plus(c(("b", 0)), 2, ev["f"], toy, 2) == c(("b", 1)),
        "in_ctr((b,1),f)=(b,1)(f,0)": ch.in_ctr(c(("b", 1)), ev["f"]) == c(("b", 1), ("f", 0)),
        "out_ctr((b,1)(f,0),b)=(f,0)": ch.out_ctr(c(("b", 1), ("f", 0)), ev["b"]) == c(("f", 0)),
    }
    report(capsys, 1, "channel operators", checks, time.perf_counter() - t0, 1)


def test_criterion_2_communication_automaton(capsys, toy, prodline):
    t0 = time.perf_counter()
    aut = build_comm(toy, (1, 2))
    a = toy.event_id["a"]
    s0 = aut.initial
    s1 = aut.delta[s0].get(plant(a))
    s2 = aut.delta[s1].get(comm(a)) if s1 is not None else None
    a0 = ((a, 0),)
    checks = {
        "initial (0,ε,ε)": aut.labels[s0] == CommState(0, (), ()),
        "(0,ε,ε) -a-> (1,(a,0),ε)": s1 is not None and aut.labels[s1] == CommState(1, a0, ()),
        "(1,(a,0),ε) -h(a)-> (1,ε,(a,0))": s2 is not None and aut.labels[s2] == CommState(1, (), a0),
    }
    toy_proj = projected_language(aut, 100)
    checks["toy projected language = {ε,a,b,bf,bfa,bfab}"] = (
        {toy.spell(w) for w in toy_proj} == {"", "a", "b", "bf", "bfa", "bfab"}
        and toy_proj == bounded_language(toy, 100)
    )
    prod = build_comm(prodline, (2, 2))
    checks["prodline projected language = plant language up to length 10"] = (
        projected_language(prod, 10) == bounded_language(prodline, 10)
    )
    report(capsys, 2, "communication automaton", checks, time.perf_counter() - t0, 5)


def test_criterion_3_maximal_subpolicy_on_toy(capsys, toy):
    t0 = time.perf_counter()
    full = full_policy(toy)
    up, pairs = max_feasible_subpolicy(toy, (1, 2), full - policy(toy, ("4", "b")))
    expected_up = full - policy(toy, ("2", "b"), ("3", "b"), ("4", "b"))
    expanded = delayed_conf_pairs(toy, pairs, 1)
    checks = {
        f"repaired policy = all minus (2,b),(3,b),(4,b) [got all minus {names(toy, full - up)}]": up == expected_up,
        "non-diagonal confusable pairs = {(2,3),(4,5)}": pairs.off_diagonal() == PairSet([(2, 3), (4, 5)]),
        f"delayed expansion = {{(2,3),(2,4),(3,4),(4,5)}} [got {sorted(expanded.off_diagonal())}]":
            expanded.off_diagonal() == PairSet([(2, 3), (2, 4), (3, 4), (4, 5)]),
        "expansion of the non-diagonal pairs alone = {(2,3),(2,4),(3,4),(4,5)}":
            delayed_conf_pairs(toy, pairs.off_diagonal(), 1).off_diagonal() == PairSet([(2, 3), (2, 4), (3, 4), (4, 5)]),
    }
    report(capsys, 3, "maximal delay-feasible subpolicy, toy", checks, time.perf_counter() - t0, 5)


def test_criterion_4_reference_policy_on_toy(capsys, toy, toy_spec):
    t0 = time.perf_counter()
    ctx = Context(toy, (1, 2))
    dstar = policy(toy, ("0", "a"), ("0", "b"), ("2", "a"), ("3", "a"))
    checks = {
        "feasible": check_delay_feasible(toy, (1, 2), dstar, ctx=ctx).feasible,
        "separates {(0,5),(1,5),(2,5)} after delayed expansion": satisfies(ctx, ctx.conf(dstar), toy_spec),
    }
    for entry in sorted(dstar):
        _, pairs = max_feasible_subpolicy(toy, (1, 2), dstar - {entry}, ctx=ctx)
        label = f"removing {names(toy, [entry])[0]} then repairing violates the requirement"
        checks[label] = not satisfies(ctx, pairs, toy_spec)
    report(capsys, 4, "reference minimal policy, toy", checks, time.perf_counter() - t0, 10)


def test_criterion_5_production_line(capsys, prodline):
    t0 = time.perf_counter()
    bounds = (2, 2)
    faults = FaultSpec.from_names(prodline, [["f"]], 2)
    refined = refine_k_diag(prodline, faults)
    ctx = Context(refined, bounds)
    eid = prodline.event_id
    dstar = policy(prodline, *[(f"x{i}", "a") for i in range(6)], *[(f"x{j}", "b") for j in (0, 1, 2, 4, 5)])
    static_ac = frozenset((q, eid[e]) for q in prodline.states for e in "ac")
    lifted = lift_policy(refined, dstar)
    feas = check_delay_feasible(refined, bounds, lifted, ctx=ctx)
    r_dstar = check_delay_k_diag(prodline, faults, bounds, dstar, over="base", refined=refined, ctx=ctx)
    r_ac = check_delay_k_diag(prodline, faults, bounds, static_ac, over="base", refined=refined, ctx=ctx)
    r_empty = check_delay_k_diag(prodline, faults, bounds, frozenset(), over="base", refined=refined, ctx=ctx)
    checks = {
        f"reference 11-entry policy (lifted) is feasible [{len(feas.violations)} violations]": feas.feasible,
        f"reference policy is delay 2-diagnosable [{len(r_dstar.witnesses)} witness pairs]": r_dstar.diagnosable,
        f"static a,c policy is delay 2-diagnosable [{len(r_ac.witnesses)} witness pairs]": r_ac.diagnosable,
        "empty policy is not diagnosable, with a witness": not r_empty.diagnosable and len(r_empty.witnesses) > 0,
    }
    report(capsys, 5, "production line diagnosability", checks, time.perf_counter() - t0, 20)


def _synthesized_policies(toy, prodline):
    toy_spec = PairSet([(0, 5), (1, 5), (2, 5)])
    out = [(toy, (1, 2), minimize_sap(toy, (1, 2), toy_spec)[0])]
    faults = FaultSpec.from_names(prodline, [["f"]], 2)
    refined = refine_k_diag(prodline, faults)
    out.append((refined, (1, 2), minimize_sap(refined, (1, 2), diag_spec(refined, faults))[0]))
    out.append((prodline, (2, 2),
                max_feasible_subpolicy(prodline, (2, 2), full_policy(prodline) - policy(prodline, ("x3", "b")))[0]))
    return out


def test_criterion_6_property_suites(capsys, toy, prodline):
    t0 = time.perf_counter()
    checks = {}
    rng = random.Random(6)

    # union closure on 100 pairs of random feasible policies
    union_bad = pairs = 0
    while pairs < 100:
        m = random_plant(rng, 6, 4)
        b = (rng.randint(0, 1), rng.randint(0, 2))
        ctx = Context(m, b)
        full = sorted(full_policy(m))
        for _ in range(5):
            p1 = max_feasible_subpolicy(m, b, frozenset(x for x in full if rng.random() < 0.6), ctx=ctx)[0]
            p2 = max_feasible_subpolicy(m, b, frozenset(x for x in full if rng.random() < 0.6), ctx=ctx)[0]
            union_bad += not check_delay_feasible(m, b, p1 | p2, ctx=ctx).feasible
            pairs += 1
    checks[f"union closure, 100 pairs [{union_bad} violations]"] = union_bad == 0

    # delay insensitivity of synthesized feasible policies, all extended words <= 10
    insens_bad = 0
    for m, b, pol in _synthesized_policies(toy, prodline):
        aut = build_comm(m, b)
        insens_bad += sum(p_map(aut, m, pol, mu) != info_map(m, pol, tuple(e.event for e in mu if e.kind is Kind.PLANT))
                          for mu in bounded_language(aut, 10))
    checks[f"observation equals undelayed observation [{insens_bad} violations]"] = insens_bad == 0

    # exhaustive toy subpolicies: monotonicity and maximality
    tctx = Context(toy, (1, 2))
    entries = sorted(full_policy(toy))
    subs = [frozenset(e for i, e in enumerate(entries) if bits >> i & 1) for bits in range(1 << len(entries))]
    feasible = [s for s in subs if check_delay_feasible(toy, (1, 2), s, ctx=tctx).feasible]
    delayed = {p: delayed_conf_pairs(toy, tctx.conf(p), 1) for p in feasible}
    mono_bad = sum(not delayed[big] <= delayed[small] for big in feasible for small in feasible if small <= big)
    checks[f"nested feasible policies: more sensors, fewer pairs [{mono_bad} violations]"] = mono_bad == 0
    max_bad = 0
    for d in subs:
        up, _ = max_feasible_subpolicy(toy, (1, 2), d, ctx=tctx)
        max_bad += not (up <= d and up in feasible and all(f <= up for f in feasible if f <= d))
    checks[f"maximality over all {len(subs)} toy subpolicies [{max_bad} violations]"] = max_bad == 0

    # verifier vs enumeration on 50 random models, bound 8
    ver_bad = 0
    for _ in range(50):
        m = random_plant(rng, 5, 4)
        b = (rng.randint(0, 2), rng.randint(0, 2))
        aut = build_comm(m, b)
        pol = frozenset(x for x in full_policy(m) if rng.random() < 0.6)
        ver_bad += conf_pairs(build_w(m, b, aut), pol) != brute_force_conf_pairs(m, pol, aut, 8)
    checks[f"pair verifier equals enumeration on 50 random models [{ver_bad} mismatches]"] = ver_bad == 0
    report(capsys, 6, "property suites", checks, time.perf_counter() - t0, 60)


def test_criterion_7_decentralized(capsys, toy, toy_spec):
    t0 = time.perf_counter()
    bounds = DelayBounds(1, 2)
    checks = {}
    single = [AgentProfile(0, toy.observable, bounds)]
    joint_spec = {(a, b) for a, b in toy_spec} | {(b, a) for a, b in toy_spec}
    for order in ("desc", "asc", [(4, 1), (0, 1)]):
        (vec,) = minimize_decentralized(toy, single, joint_spec, order=order)
        checks[f"one agent equals centralized result, order {order}"] = \
            vec == minimize_sap(toy, bounds, toy_spec, order=order)[0]

    a, b = toy.event_id["a"], toy.event_id["b"]
    agents = [AgentProfile(0, frozenset({a}), bounds), AgentProfile(1, frozenset({b}), bounds)]
    spec = {(5, x, y) for x in toy.states for y in toy.states if x in (0, 2, 3) or y in (0, 1)}
    vec = minimize_decentralized(toy, agents, spec)
    checks["componentwise feasible"] = all(
        check_delay_feasible(agent_view(toy, ag), ag.bounds, p).feasible for ag, p in zip(agents, vec))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HorizonTooSmallWarning)
        for engine in ("product", "brute"):
            checks[f"joint check passes ({engine} engine)"] = \
                joint_conf_check(toy, agents, vec, spec, engine=engine).disjoint
    survivors = []
    for i, ag in enumerate(agents):
        view = agent_view(toy, ag)
        for entry in vec[i]:
            trial = list(vec)
            trial[i] = max_feasible_subpolicy(view, ag.bounds, vec[i] - {entry})[0]
            if joint_conf_check(toy, agents, trial, spec).disjoint:
                survivors.append((i, entry))
    checks[f"every single removal breaks the requirement [{len(survivors)} survivors]"] = not survivors
    report(capsys, 7, "decentralized synthesis", checks, time.perf_counter() - t0, 30)
