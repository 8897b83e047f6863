"""Scenario files: a line-oriented format for structures, events, checks.

A file declares the agents, the vocabulary, the initial structure
(LAW, OBS lines, STATE), then any number of EVENT blocks applied in
order, CHECK queries, and optionally one ACTION block (an explicit
action model, used by the translate command).  `#` starts a comment;
blank lines separate nothing in particular.

    AGENTS a b
    VARS p q
    LAW p | q
    OBS a: p <-> p'
    STATE p

    EVENT
      ADDVARS x
      PRE [a] p
      CHANGE p := x & p
      OBS+ a: x <-> x'
      ASSIGN x

    CHECK after 1 [a] p EXPECT true
    CHECK ~q

    ACTION
      EVENTS e0 e1
      PRE e1: p
      POST e1: p := ~p
      REL a: e0->e0 e1->e1
      DESIGNATED e1

Omitted LAW and PRE default to Top, omitted OBS and OBS+ to Top (the
agent learns nothing), omitted REL to the empty relation, omitted
STATE and ASSIGN to the empty set.  CHECK without `after` runs after
the last event; EXPECT turns the query into a pass/fail assertion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .boolfun import Engine, VarId
from .errors import ParseError
from .explicit import ActionModel
from .language import (
    TOP,
    Formula,
    compile_formula,
    format_formula,
    parse,
    recover_formula,
)
from .symbolic import BeliefStructure, Event, Scene, Transformer

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*(?:(?:°|@o)[0-9]*)?'?"
_EVENT_ID = r"[^\s:]+"

_OBS_RE = re.compile(rf"^OBS\s+({_IDENT})\s*:\s*(.*)$")
_OBS_PLUS_RE = re.compile(rf"^OBS\+\s+({_IDENT})\s*:\s*(.*)$")
_CHANGE_RE = re.compile(rf"^CHANGE\s+({_IDENT})\s*:=\s*(.*)$")
_PRE_ID_RE = re.compile(rf"^PRE\s+({_EVENT_ID})\s*:\s*(.*)$")
_POST_RE = re.compile(rf"^POST\s+({_EVENT_ID})\s*:\s*({_IDENT})\s*:=\s*(.*)$")
_REL_RE = re.compile(rf"^REL\s+({_IDENT})\s*:\s*(.*)$")
_CHECK_RE = re.compile(
    r"^CHECK\s+(?:after\s+(\d+)\s+)?(.*?)(?:\s+EXPECT\s+(true|false))?$"
)


@dataclass
class EventSpec:
    line: int
    add: list[str] = field(default_factory=list)
    pre: Formula = TOP
    changes: list[tuple[str, Formula]] = field(default_factory=list)
    obs: dict[str, Formula] = field(default_factory=dict)
    assign: list[str] = field(default_factory=list)


@dataclass
class ActionSpec:
    line: int
    events: list[str] = field(default_factory=list)
    pre: dict[str, Formula] = field(default_factory=dict)
    post: dict[str, list[tuple[str, Formula]]] = field(default_factory=dict)
    rel: dict[str, list[tuple[str, str]]] = field(default_factory=dict)
    designated: str | None = None


@dataclass
class CheckSpec:
    line: int
    after: int | None
    formula: Formula
    expect: bool | None


@dataclass
class Scenario:
    agents: list[str] = field(default_factory=list)
    vars: list[str] = field(default_factory=list)
    law: Formula = TOP
    obs: dict[str, Formula] = field(default_factory=dict)
    state: list[str] = field(default_factory=list)
    events: list[EventSpec] = field(default_factory=list)
    checks: list[CheckSpec] = field(default_factory=list)
    action: ActionSpec | None = None


def _names(rest: str, what: str, line: int) -> list[str]:
    names = rest.split()
    for name in names:
        if not re.fullmatch(_IDENT, name):
            raise ParseError(f"bad {what} name: {name}", line=line)
    if len(set(names)) != len(names):
        raise ParseError(f"repeated {what} name", line=line)
    return names


def _formula(text: str, line: int) -> Formula:
    if not text.strip():
        raise ParseError("missing formula", line=line)
    return parse(text, line=line)


def parse_scenario(text: str) -> Scenario:
    """Parse the scenario text; raises ParseError with a line number."""
    scenario = Scenario()
    seen: set[str] = set()
    block: EventSpec | ActionSpec | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word = line.split(None, 1)[0]
        rest = line[len(word):].strip()

        if word in ("AGENTS", "VARS", "LAW", "OBS", "STATE", "EVENT", "CHECK", "ACTION"):
            block = None
        if word in ("AGENTS", "VARS", "LAW", "STATE"):
            if word in seen:
                raise ParseError(f"{word} given twice", line=lineno)
            seen.add(word)

        if word == "AGENTS":
            scenario.agents = _names(rest, "agent", lineno)
        elif word == "VARS":
            scenario.vars = _names(rest, "variable", lineno)
        elif word == "LAW":
            scenario.law = _formula(rest, lineno)
        elif word == "OBS":
            m = _OBS_RE.match(line)
            if not m:
                raise ParseError("expected OBS <agent>: <formula>", line=lineno)
            agent = m.group(1)
            if agent in scenario.obs:
                raise ParseError(f"OBS given twice for {agent}", line=lineno)
            scenario.obs[agent] = _formula(m.group(2), lineno)
        elif word == "STATE":
            scenario.state = _names(rest, "variable", lineno)
        elif word == "EVENT":
            if rest:
                raise ParseError("unexpected text after EVENT", line=lineno)
            block = EventSpec(line=lineno)
            scenario.events.append(block)
        elif word == "ACTION":
            if rest:
                raise ParseError("unexpected text after ACTION", line=lineno)
            if scenario.action is not None:
                raise ParseError("a second ACTION block", line=lineno)
            block = ActionSpec(line=lineno)
            scenario.action = block
        elif word == "CHECK":
            m = _CHECK_RE.match(line)
            body = m.group(2) if m else ""
            if not m or not body.strip():
                raise ParseError(
                    "expected CHECK [after N] <formula> [EXPECT true|false]",
                    line=lineno,
                )
            after = int(m.group(1)) if m.group(1) else None
            expect = None if m.group(3) is None else m.group(3) == "true"
            scenario.checks.append(
                CheckSpec(lineno, after, _formula(body, lineno), expect)
            )
        elif word == "ADDVARS":
            if not isinstance(block, EventSpec):
                raise ParseError("ADDVARS outside an EVENT block", line=lineno)
            if block.add:
                raise ParseError("ADDVARS given twice", line=lineno)
            block.add = _names(rest, "event variable", lineno)
        elif word == "PRE":
            if isinstance(block, EventSpec):
                if block.pre is not TOP:
                    raise ParseError("PRE given twice", line=lineno)
                block.pre = _formula(rest, lineno)
            elif isinstance(block, ActionSpec):
                m = _PRE_ID_RE.match(line)
                if not m:
                    raise ParseError("expected PRE <event>: <formula>", line=lineno)
                if m.group(1) in block.pre:
                    raise ParseError(f"PRE given twice for {m.group(1)}", line=lineno)
                block.pre[m.group(1)] = _formula(m.group(2), lineno)
            else:
                raise ParseError("PRE outside an EVENT or ACTION block", line=lineno)
        elif word == "CHANGE":
            if not isinstance(block, EventSpec):
                raise ParseError("CHANGE outside an EVENT block", line=lineno)
            m = _CHANGE_RE.match(line)
            if not m:
                raise ParseError("expected CHANGE <var> := <formula>", line=lineno)
            if any(name == m.group(1) for name, _ in block.changes):
                raise ParseError(f"CHANGE given twice for {m.group(1)}", line=lineno)
            block.changes.append((m.group(1), _formula(m.group(2), lineno)))
        elif word == "OBS+":
            if not isinstance(block, EventSpec):
                raise ParseError("OBS+ outside an EVENT block", line=lineno)
            m = _OBS_PLUS_RE.match(line)
            if not m:
                raise ParseError("expected OBS+ <agent>: <formula>", line=lineno)
            if m.group(1) in block.obs:
                raise ParseError(f"OBS+ given twice for {m.group(1)}", line=lineno)
            block.obs[m.group(1)] = _formula(m.group(2), lineno)
        elif word == "ASSIGN":
            if not isinstance(block, EventSpec):
                raise ParseError("ASSIGN outside an EVENT block", line=lineno)
            block.assign = _names(rest, "event variable", lineno)
        elif word == "EVENTS":
            if not isinstance(block, ActionSpec):
                raise ParseError("EVENTS outside an ACTION block", line=lineno)
            if block.events:
                raise ParseError("EVENTS given twice", line=lineno)
            block.events = rest.split()
            if not block.events:
                raise ParseError("EVENTS needs at least one event", line=lineno)
            if len(set(block.events)) != len(block.events):
                raise ParseError("repeated event identifier", line=lineno)
        elif word == "POST":
            if not isinstance(block, ActionSpec):
                raise ParseError("POST outside an ACTION block", line=lineno)
            m = _POST_RE.match(line)
            if not m:
                raise ParseError("expected POST <event>: <var> := <formula>", line=lineno)
            entries = block.post.setdefault(m.group(1), [])
            if any(name == m.group(2) for name, _ in entries):
                raise ParseError(
                    f"POST given twice for {m.group(2)} of {m.group(1)}", line=lineno
                )
            entries.append((m.group(2), _formula(m.group(3), lineno)))
        elif word == "REL":
            if not isinstance(block, ActionSpec):
                raise ParseError("REL outside an ACTION block", line=lineno)
            m = _REL_RE.match(line)
            if not m:
                raise ParseError("expected REL <agent>: <id>-><id> ...", line=lineno)
            if m.group(1) in block.rel:
                raise ParseError(f"REL given twice for {m.group(1)}", line=lineno)
            pairs = []
            for chunk in m.group(2).split():
                halves = chunk.split("->")
                if len(halves) != 2 or not halves[0] or not halves[1]:
                    raise ParseError(f"bad relation pair: {chunk}", line=lineno)
                pairs.append((halves[0], halves[1]))
            block.rel[m.group(1)] = pairs
        elif word == "DESIGNATED":
            if not isinstance(block, ActionSpec):
                raise ParseError("DESIGNATED outside an ACTION block", line=lineno)
            if block.designated is not None:
                raise ParseError("DESIGNATED given twice", line=lineno)
            parts = rest.split()
            if len(parts) != 1:
                raise ParseError("DESIGNATED takes one event", line=lineno)
            block.designated = parts[0]
        else:
            raise ParseError(f"unknown keyword: {word}", line=lineno)

    _validate(scenario)
    return scenario


def _validate(scenario: Scenario) -> None:
    agents = set(scenario.agents)
    declared = set(scenario.vars)
    for agent in scenario.obs:
        if agent not in agents:
            raise ParseError(f"OBS for undeclared agent: {agent}")
    stray = set(scenario.state) - declared
    if stray:
        raise ParseError(f"STATE uses undeclared variable: {sorted(stray)[0]}")
    for spec in scenario.events:
        for agent in spec.obs:
            if agent not in agents:
                raise ParseError(
                    f"OBS+ for undeclared agent: {agent}", line=spec.line
                )
        assigned = set(spec.assign) - set(spec.add)
        if assigned:
            raise ParseError(
                f"ASSIGN of undeclared event variable: {sorted(assigned)[0]}",
                line=spec.line,
            )
    action = scenario.action
    if action is not None:
        ids = set(action.events)
        for what, keys in (("PRE", action.pre), ("POST", action.post)):
            for eid in keys:
                if eid not in ids:
                    raise ParseError(
                        f"{what} for undeclared event: {eid}", line=action.line
                    )
        for agent, pairs in action.rel.items():
            if agent not in agents:
                raise ParseError(
                    f"REL for undeclared agent: {agent}", line=action.line
                )
            for a, b in pairs:
                if a not in ids or b not in ids:
                    raise ParseError(
                        f"REL pair uses undeclared event: {a}->{b}", line=action.line
                    )
        if action.designated is not None and action.designated not in ids:
            raise ParseError(
                f"DESIGNATED undeclared event: {action.designated}", line=action.line
            )


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as handle:
        return parse_scenario(handle.read())


# -- building ------------------------------------------------------------------

def build_scene(scenario: Scenario, engine: Engine) -> Scene:
    """The initial scene of the scenario, in the given engine."""
    vocab = tuple(engine.variable(name) for name in scenario.vars)
    env = {v.name: v for v in vocab}
    law = compile_formula(scenario.law, env, engine)
    full_env = dict(env)
    full_env.update({engine.primed(v).name: engine.primed(v) for v in vocab})
    observations = {}
    for agent in scenario.agents:
        phi = scenario.obs.get(agent, TOP)
        observations[agent] = compile_formula(phi, full_env, engine)
    structure = BeliefStructure(engine, vocab, law, observations)
    state = frozenset(env[name] for name in scenario.state)
    return Scene(structure, state)


def build_event(
    spec: EventSpec, structure: BeliefStructure, engine: Engine
) -> Event:
    """Build the event of one EVENT block against the current structure."""
    add = tuple(engine.variable(name) for name in spec.add)
    obs_env = {v.name: v for v in add}
    obs_env.update({engine.primed(v).name: engine.primed(v) for v in add})
    event_obs = {}
    for agent in structure.agents:
        phi = spec.obs.get(agent, TOP)
        event_obs[agent] = compile_formula(phi, obs_env, engine)
    env = structure.env()
    modified = []
    changes = {}
    for name, phi in spec.changes:
        var = env.get(name)
        if var is None:
            raise ParseError(
                f"CHANGE of a variable outside the vocabulary: {name}",
                line=spec.line,
            )
        modified.append(var)
        changes[var] = phi
    transformer = Transformer(add, spec.pre, tuple(modified), changes, event_obs)
    actual = frozenset(engine.variable(name) for name in spec.assign)
    return Event(transformer, actual)


def build_action(
    spec: ActionSpec, scenario: Scenario, engine: Engine
) -> tuple[ActionModel, str]:
    """Build the ACTION block's action model and its designated event."""
    for name in scenario.vars:
        engine.variable(name)
    relations = {
        agent: frozenset(spec.rel.get(agent, ())) for agent in scenario.agents
    }
    post = {eid: dict(entries) for eid, entries in spec.post.items()}
    action = ActionModel(tuple(spec.events), relations, dict(spec.pre), post)
    if spec.designated is None:
        raise ParseError("ACTION block without DESIGNATED", line=spec.line)
    return action, spec.designated


# -- writing -------------------------------------------------------------------

def format_event_id(eid) -> str:
    if isinstance(eid, frozenset):
        return "{" + ",".join(sorted(eid)) + "}"
    return str(eid)


def format_event_block(transformer: Transformer, actual) -> str:
    """Render a transformer with its actual event as an EVENT block."""
    lines = ["EVENT"]
    if transformer.add_vocab:
        names = " ".join(v.name for v in transformer.add_vocab)
        lines.append(f"  ADDVARS {names}")
    if transformer.event_law != TOP:
        lines.append(f"  PRE {format_formula(transformer.event_law)}")
    for v in transformer.modified:
        lines.append(f"  CHANGE {v.name} := {format_formula(transformer.change_laws[v])}")
    for agent, obs in transformer.event_obs.items():
        if not obs.is_true:
            lines.append(f"  OBS+ {agent}: {format_formula(recover_formula(obs))}")
    if actual:
        names = " ".join(sorted(v.name for v in actual))
        lines.append(f"  ASSIGN {names}")
    return "\n".join(lines)


def format_action_block(action: ActionModel, designated) -> str:
    """Render an action model with its designated event as an ACTION block."""
    ids = {a: format_event_id(a) for a in action.events}
    lines = ["ACTION"]
    lines.append("  EVENTS " + " ".join(ids[a] for a in action.events))
    for a in action.events:
        pre = action.pre[a]
        if pre != TOP:
            lines.append(f"  PRE {ids[a]}: {format_formula(pre)}")
    for a in action.events:
        for prop, phi in action.post.get(a, {}).items():
            lines.append(f"  POST {ids[a]}: {prop} := {format_formula(phi)}")
    index = {a: k for k, a in enumerate(action.events)}
    for agent, rel in action.relations.items():
        pairs = sorted(rel, key=lambda ab: (index[ab[0]], index[ab[1]]))
        body = " ".join(f"{ids[a]}->{ids[b]}" for a, b in pairs)
        lines.append(f"  REL {agent}: {body}".rstrip())
    lines.append(f"  DESIGNATED {ids[designated]}")
    return "\n".join(lines)
