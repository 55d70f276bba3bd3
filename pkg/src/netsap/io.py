"""JSON file formats for models, policies, required state pairs and agents."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .fsa import PairSet, TimedPlant, make_plant
from .observability import make_policy


def _read(src):
    if isinstance(src, (dict, list)):
        return src
    return json.loads(Path(src).read_text())


def _write(obj, dst):
    Path(dst).write_text(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def model_from_json(data) -> TimedPlant:
    data = _read(data)
    ev = data.get("events", {})
    return make_plant(
        states=data["states"],
        initial=data.get("initial"),
        observable=ev.get("observable", []),
        unobservable=ev.get("unobservable", []),
        transitions=[(t["from"], t["event"], t["to"], t["t_min"]) for t in data["transitions"]],
    )


def model_to_json(model: TimedPlant) -> dict:
    names, evs = model.state_names, model.event_names
    return {
        "states": list(names),
        "initial": names[model.initial],
        "events": {
            "observable": [evs[e] for e in model.events if e in model.observable],
            "unobservable": [evs[e] for e in model.events if e not in model.observable],
        },
        "transitions": [
            {"from": names[q], "event": evs[e], "to": names[r], "t_min": model.t_min[q, e]}
            for (q, e), r in sorted(model.delta.items())
        ],
    }


def load_fixture(name: str) -> TimedPlant:
    """Bundled models: ``toy`` and ``prodline``."""
    text = resources.files("netsap.fixtures").joinpath(f"{name}.json").read_text()
    return model_from_json(json.loads(text))


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("netsap.fixtures").joinpath(name)))


def policy_from_json(model: TimedPlant, data) -> frozenset:
    data = _read(data)
    entries = data["activate"] if isinstance(data, dict) else data
    sid, eid = model.state_id, model.event_id
    return make_policy(model, [(sid[a["state"]], eid[a["event"]]) for a in entries])


def policy_to_json(model: TimedPlant, policy) -> dict:
    return {
        "activate": [
            {"state": model.state_names[q], "event": model.event_names[e]}
            for q, e in sorted(policy)
        ]
    }


def pairs_from_json(model: TimedPlant, data) -> PairSet:
    data = _read(data)
    rows = data["pairs"] if isinstance(data, dict) else data
    sid = model.state_id
    return PairSet((sid[a], sid[b]) for a, b in rows)


def pairs_to_json(model: TimedPlant, pairs: PairSet, keep_diagonal: bool = False) -> dict:
    names = model.state_names
    rows = sorted([names[a], names[b]] for a, b in pairs if keep_diagonal or a != b)
    return {"pairs": rows}


def tuples_from_json(model: TimedPlant, data) -> frozenset:
    data = _read(data)
    rows = data["tuples"] if isinstance(data, dict) else data
    sid = model.state_id
    return frozenset(tuple(sid[n] for n in row) for row in rows)


def tuples_to_json(model: TimedPlant, tuples) -> dict:
    names = model.state_names
    return {"tuples": sorted([names[q] for q in row] for row in tuples)}


dump_json = _write
read_json = _read
