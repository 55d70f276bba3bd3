"""Graphviz DOT export for plants, communication automata and W."""
from __future__ import annotations

from .channels import render
from .comm import CommState, WState
from .fsa import Automaton, ExtEvent, TimedPlant


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def state_label(model: TimedPlant, label) -> str:
    names, evs = model.state_names, model.event_names
    if isinstance(label, WState):
        return f"({names[label.plant]}|{render(label.obs, evs)}|{render(label.ctrl, evs)}|{names[label.cmd]})"
    if isinstance(label, CommState):
        return f"({names[label.plant]}|{render(label.obs, evs)}|{render(label.ctrl, evs)})"
    if isinstance(label, int):
        return names[label]
    return str(label)


def _event_label(model: TimedPlant, ev) -> str:
    if isinstance(ev, ExtEvent):
        return ev.render(model.event_names)
    return model.event_names[ev]


def to_dot(model: TimedPlant, aut: Automaton | None = None, name: str = "G") -> str:
    """DOT text for ``aut`` (or the plant itself), states labelled by name or
    ``(q|obs|ctrl)`` / ``(q|obs|ctrl|cmd)``."""
    if aut is None:
        aut = model.as_automaton()
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;", "  node [shape=ellipse];",
             '  __start [shape=point, label=""];', f"  __start -> s{aut.initial};"]
    for i, lab in enumerate(aut.labels):
        lines.append(f"  s{i} [label={_quote(state_label(model, lab))}];")
    for q, ev, r in aut.transitions():
        style = "" if not isinstance(ev, ExtEvent) or ev.kind == 0 else ", style=dashed"
        lines.append(f"  s{q} -> s{r} [label={_quote(_event_label(model, ev))}{style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
