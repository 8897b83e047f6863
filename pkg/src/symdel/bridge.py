"""Translations between events and actions, and the equivalence harness.

An event over event variables V+ expands into an action model whose
atomic events are the subsets of V+; an action model compresses into an
event over fresh label variables encoding event identity in binary.
The harness generates random instances of both kinds and checks that
the symbolic and the explicit pipeline agree formula by formula, along
with the world-to-state morphism conditions that drive the agreement.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .boolfun import BoolFn, Engine, VarId
from .errors import NotExecutable, VocabularyError
from .explicit import (
    ActionModel,
    GlobalEvaluator,
    KripkeModel,
    PointedModel,
    eval_world,
    format_point,
    model_of_structure,
    product_update,
    structure_of_model,
)
from .language import (
    BOT,
    TOP,
    And,
    Atom,
    Box,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    compile_formula,
    conj,
    disj,
    format_formula,
    prime,
    subset_formula,
    substitute,
)
from .symbolic import (
    BeliefStructure,
    Event,
    Scene,
    Transformer,
    Translator,
    minimize,
    transform_with_copies,
    updated_state,
)


# -- event -> action ---------------------------------------------------------

def _subsets(variables: Sequence[VarId]) -> list[frozenset[VarId]]:
    # binary counting, the first variable being the least significant bit
    return [
        frozenset(v for j, v in enumerate(variables) if (k >> j) & 1)
        for k in range(2 ** len(variables))
    ]


def act(event: Event) -> tuple[ActionModel, frozenset]:
    """Expand the event into an action model over the subsets of V+.

    Event identifiers are the subsets themselves (as sets of variable
    names); the returned designated event is the one for the actual x.
    """
    transformer = event.transformer
    add = transformer.add_vocab
    subsets = _subsets(add)
    ids = [frozenset(v.name for v in sub) for sub in subsets]
    pre = {}
    post = {}
    for sub, eid in zip(subsets, ids):
        binding = {v.name: (TOP if v in sub else BOT) for v in add}
        pre[eid] = substitute(transformer.event_law, binding)
        post[eid] = {
            v.name: substitute(transformer.change_laws[v], binding)
            for v in transformer.modified
        }
    relations = {}
    if transformer.event_obs:
        engine = next(iter(transformer.event_obs.values())).engine
        primed = {v: engine.primed(v) for v in add}
        for agent, obs in transformer.event_obs.items():
            relations[agent] = frozenset(
                (ea, eb)
                for sa, ea in zip(subsets, ids)
                for sb, eb in zip(subsets, ids)
                if obs.holds(sa | {primed[v] for v in sb})
            )
    action = ActionModel(tuple(ids), relations, pre, post)
    return action, frozenset(v.name for v in event.actual)


# -- action -> event ---------------------------------------------------------

def trf_with_labels(
    engine: Engine, action: ActionModel, designated
) -> tuple[Transformer, frozenset[VarId], dict]:
    """Compress the action model into a transformer over fresh labels.

    Events are numbered in declaration order and labeled by the binary
    encoding of their index over ceil(log2 |A|) fresh variables.  Also
    returns the full event-to-label map (used by the morphism checks).
    """
    if designated not in action.pre:
        raise VocabularyError(f"unknown event: {designated!r}")
    count = len(action.events)
    n = (count - 1).bit_length()
    labels = [engine.fresh_stem("q") for _ in range(n)]
    label_names = [v.name for v in labels]
    label = {
        a: frozenset(labels[j] for j in range(n) if (k >> j) & 1)
        for k, a in enumerate(action.events)
    }

    def cube(a) -> Formula:
        return subset_formula({v.name for v in label[a]}, label_names)

    event_law = disj([conj([action.pre[a], cube(a)]) for a in action.events])
    changed = action.changed_props()
    modified = tuple(engine.variable(p) for p in changed)
    change_laws = {
        v: disj(
            [conj([cube(a), action.post_formula(a, v.stem)]) for a in action.events]
        )
        for v in modified
    }
    env = {v.name: v for v in labels}
    env.update({engine.primed(v).name: engine.primed(v) for v in labels})
    index = {a: k for k, a in enumerate(action.events)}
    event_obs = {}
    for agent, rel in action.relations.items():
        pairs = sorted(rel, key=lambda ab: (index[ab[0]], index[ab[1]]))
        event_obs[agent] = compile_formula(
            disj([conj([cube(a), prime(cube(b))]) for (a, b) in pairs]),
            env,
            engine,
        )
    transformer = Transformer(
        tuple(labels), event_law, modified, change_laws, event_obs
    )
    return transformer, frozenset(label[designated]), label


def trf(engine: Engine, action: ActionModel, designated) -> tuple[Transformer, frozenset[VarId]]:
    transformer, actual, _ = trf_with_labels(engine, action, designated)
    return transformer, actual


# -- morphism ----------------------------------------------------------------

@dataclass
class MorphismReport:
    ok: bool
    detail: str = ""


def check_morphism(
    structure: BeliefStructure,
    model: KripkeModel,
    shared: Sequence[str],
    g: Mapping,
) -> MorphismReport:
    """Check the three world-to-state conditions.

    C1: g respects edges through the observation functions.
    C2: g agrees with the valuation on the shared vocabulary.
    C3: the states of the structure are exactly the image of g.
    Returns the first violation found, in that order.
    """
    engine = structure.engine
    vocab = set(structure.vocabulary)
    for w in model.worlds:
        if w not in g:
            return MorphismReport(False, f"g undefined on world {format_point(w)}")
        if not frozenset(g[w]) <= vocab:
            return MorphismReport(
                False, f"g({format_point(w)}) leaves the vocabulary"
            )
    primed = {v: engine.primed(v) for v in structure.vocabulary}
    for agent, obs in structure.observations.items():
        rel = model.relations.get(agent)
        if rel is None:
            return MorphismReport(False, f"model lacks agent {agent}")
        for w1 in model.worlds:
            base = set(g[w1])
            for w2 in model.worlds:
                accepted = obs.holds(base | {primed[v] for v in g[w2]})
                if accepted != ((w1, w2) in rel):
                    return MorphismReport(
                        False,
                        f"C1 fails for {agent} at "
                        f"({format_point(w1)},{format_point(w2)}): "
                        f"observation says {accepted}, edge says {not accepted}",
                    )
    shared_set = set(shared)
    for w in model.worlds:
        names = {v.name for v in g[w]}
        for p in sorted(shared_set):
            if (p in names) != (p in model.valuation[w]):
                return MorphismReport(
                    False, f"C2 fails at {format_point(w)} on atom {p}"
                )
    states = set(structure.states())
    image = {frozenset(g[w]) for w in model.worlds}
    for s in sorted(states - image, key=lambda s: sorted(v.name for v in s)):
        label = ",".join(sorted(v.name for v in s))
        return MorphismReport(False, f"C3 fails: state {{{label}}} has no g-preimage")
    for s in sorted(image - states, key=lambda s: sorted(v.name for v in s)):
        label = ",".join(sorted(v.name for v in s))
        return MorphismReport(False, f"C3 fails: g-image {{{label}}} is not a state")
    return MorphismReport(True)


# -- instance generation -------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    """Size limits for generated instances."""

    max_vocab: int = 4
    max_event_vocab: int = 2
    max_modified: int = 2
    max_agents: int = 2
    max_worlds: int = 6
    max_events: int = 3


_STEMS = ("p", "q", "r", "u")
_AGENTS = ("a", "b")


def _random_bool(rng, atoms, depth) -> Formula:
    if depth == 0 or not atoms:
        if atoms and rng.random() < 0.85:
            atom = Atom(rng.choice(atoms))
            return atom if rng.random() < 0.5 else Not(atom)
        return TOP if rng.random() < 0.5 else BOT
    k = rng.randrange(5)
    if k == 0:
        return Not(_random_bool(rng, atoms, depth - 1))
    a = _random_bool(rng, atoms, depth - 1)
    b = _random_bool(rng, atoms, depth - 1)
    if k == 1:
        return And((a, b))
    if k == 2:
        return Or((a, b))
    if k == 3:
        return Implies(a, b)
    return Iff(a, b)


def _random_formula(rng, atoms, agents, depth, box_atoms=None) -> Formula:
    """Random epistemic formula; atoms under a belief operator are drawn
    from box_atoms (defaulting to atoms)."""
    if box_atoms is None:
        box_atoms = atoms
    if depth == 0 or rng.random() < 0.25:
        return _random_bool(rng, list(atoms), 1)
    k = rng.randrange(6)
    if k == 0 and agents:
        return Box(
            rng.choice(list(agents)),
            _random_formula(rng, box_atoms, agents, depth - 1, box_atoms),
        )
    if k <= 1:
        return Not(_random_formula(rng, atoms, agents, depth - 1, box_atoms))
    a = _random_formula(rng, atoms, agents, depth - 1, box_atoms)
    b = _random_formula(rng, atoms, agents, depth - 1, box_atoms)
    if k == 2:
        return And((a, b))
    if k == 3:
        return Or((a, b))
    if k == 4:
        return Implies(a, b)
    return Iff(a, b)


def generate_scene(seed: int, bounds: Bounds = Bounds()) -> Scene:
    """Deterministic random scene: satisfiable law, valid actual state."""
    rng = random.Random(f"scene-{seed}")
    engine = Engine()
    vocab = [engine.variable(s) for s in _STEMS[: rng.randint(1, bounds.max_vocab)]]
    agents = list(_AGENTS[: rng.randint(1, bounds.max_agents)])
    names = [v.name for v in vocab]
    env = {v.name: v for v in vocab}
    law = engine.false
    for _ in range(50):
        law = compile_formula(_random_bool(rng, names, 2), env, engine)
        if not law.is_false:
            break
    if law.is_false:
        law = engine.true
    double_env = dict(env)
    double_env.update({engine.primed(v).name: engine.primed(v) for v in vocab})
    double_names = list(double_env)
    observations = {
        agent: compile_formula(_random_bool(rng, double_names, 2), double_env, engine)
        for agent in agents
    }
    structure = BeliefStructure(engine, tuple(vocab), law, observations)
    state = rng.choice(structure.states())
    return Scene(structure, state)


def _random_event(rng, scene: Scene, bounds: Bounds) -> Event:
    structure = scene.structure
    engine = structure.engine
    vocab = list(structure.vocabulary)
    vocab_names = [v.name for v in vocab]
    agents = list(structure.agents)
    add = tuple(
        engine.variable(f"x{j + 1}")
        for j in range(rng.randint(0, bounds.max_event_vocab))
    )
    add_names = [v.name for v in add]
    event_law = _random_formula(
        rng, vocab_names + add_names, agents, 2, box_atoms=vocab_names
    )
    modified = tuple(rng.sample(vocab, rng.randint(0, min(bounds.max_modified, len(vocab)))))
    change_laws = {
        v: _random_bool(rng, vocab_names + add_names, 2) for v in modified
    }
    obs_env = {v.name: v for v in add}
    obs_env.update({engine.primed(v).name: engine.primed(v) for v in add})
    obs_names = list(obs_env)
    event_obs = {
        agent: compile_formula(_random_bool(rng, obs_names, 2), obs_env, engine)
        for agent in agents
    }
    actual = frozenset(v for v in add if rng.random() < 0.5)
    return Event(
        Transformer(add, event_law, modified, change_laws, event_obs), actual
    )


def generate_scene_event(
    seed: int, bounds: Bounds = Bounds(), retries: int = 10
) -> tuple[Scene, Event]:
    """Deterministic random (scene, event) pair, redrawing the event a few
    times when it is not executable at the scene's state."""
    scene = generate_scene(seed, bounds)
    rng = random.Random(f"event-{seed}")
    event = _random_event(rng, scene, bounds)
    for _ in range(retries):
        try:
            apply_event_quiet(scene, event)
            break
        except NotExecutable:
            event = _random_event(rng, scene, bounds)
    return scene, event


def apply_event_quiet(scene: Scene, event: Event) -> Scene:
    from .symbolic import apply_event

    return apply_event(scene, event)


def generate_model_action(
    seed: int, bounds: Bounds = Bounds()
) -> tuple[PointedModel, ActionModel, object]:
    """Deterministic random pointed model plus action with a designated
    event, steered toward a surviving designated pair."""
    rng = random.Random(f"model-{seed}")
    props = list(_STEMS[: rng.randint(1, bounds.max_vocab)])
    agents = list(_AGENTS[: rng.randint(1, bounds.max_agents)])
    worlds = tuple(f"w{k}" for k in range(rng.randint(1, bounds.max_worlds)))
    valuation = {
        w: frozenset(p for p in props if rng.random() < 0.5) for w in worlds
    }
    relations = {
        agent: frozenset(
            (u, v) for u in worlds for v in worlds if rng.random() < 0.4
        )
        for agent in agents
    }
    model = KripkeModel(tuple(props), worlds, relations, valuation)
    events = tuple(f"e{k}" for k in range(rng.randint(1, bounds.max_events)))
    pre = {}
    post = {}
    for a in events:
        pre[a] = _random_formula(rng, props, agents, rng.choice((0, 1, 1)))
        targets = rng.sample(props, rng.randint(0, min(bounds.max_modified, len(props))))
        post[a] = {
            p: (_random_bool(rng, props, 1) if rng.random() < 0.8 else Atom(p))
            for p in targets
        }
    action_relations = {
        agent: frozenset(
            (x, y) for x in events for y in events if rng.random() < 0.5
        )
        for agent in agents
    }
    action = ActionModel(events, action_relations, pre, post)
    pairs = [(w, a) for w in worlds for a in events]
    rng.shuffle(pairs)
    point, designated = pairs[0]
    for w, a in pairs:
        if eval_world(model, w, action.pre[a]):
            point, designated = w, a
            break
    return PointedModel(model, point), action, designated


# -- formula family ------------------------------------------------------------

def formula_family(
    atoms: Sequence[str], agents: Sequence[str], depth: int = 2
) -> list[Formula]:
    """Deterministic formula battery: small boolean leaves (at most two
    atoms each) under all nestings of belief operators and their
    negations up to the given modal depth."""
    leaves: list[Formula] = [TOP]
    for p in atoms:
        leaves.append(Atom(p))
        leaves.append(Not(Atom(p)))
    for p, q in zip(atoms, atoms[1:]):
        leaves.append(And((Atom(p), Atom(q))))
        leaves.append(Or((Atom(p), Not(Atom(q)))))
        leaves.append(Iff(Atom(p), Atom(q)))
    family = list(leaves)
    frontier: list[Formula] = list(leaves)
    for _ in range(depth):
        layer: list[Formula] = []
        for agent in agents:
            for f in frontier:
                boxed = Box(agent, f)
                layer.append(boxed)
                layer.append(Not(boxed))
        family.extend(layer)
        frontier = layer
    return list(dict.fromkeys(family))


# -- instance checks -------------------------------------------------------------

def check_part_i(scene: Scene, event: Event, depth: int = 2) -> str | None:
    """Symbolic update vs. explicit pipeline on one (scene, event).

    Compares executability, the morphism conditions for the updated
    state map, and truth of the formula family at the updated points.
    Returns None on agreement, else a description of the first failure.
    """
    structure = scene.structure
    engine = structure.engine
    transformer = event.transformer

    model = model_of_structure(structure)
    action, designated = act(event)
    state_id = frozenset(v.name for v in scene.state)
    survives = eval_world(model, state_id, action.pre[designated])

    new_structure, copies = transform_with_copies(structure, transformer)
    env = structure.env()
    env.update({v.name: v for v in transformer.add_vocab})
    change_fns = {
        v: compile_formula(phi, env, engine)
        for v, phi in transformer.change_laws.items()
    }

    def g_of(state, actual):
        return updated_state(transformer, copies, change_fns, state, actual)

    state_new = g_of(scene.state, event.actual)
    executable = new_structure.law.holds(state_new)
    if executable != survives:
        return (
            f"executability disagrees: explicit precondition is {survives}, "
            f"symbolic law check is {executable}"
        )

    product = product_update(model, action)
    var_of = structure.env()
    xvar_of = {v.name: v for v in transformer.add_vocab}
    g = {
        (w, a): g_of(
            frozenset(var_of[p] for p in w), frozenset(xvar_of[n] for n in a)
        )
        for (w, a) in product.worlds
    }
    report = check_morphism(new_structure, product, model.vocabulary, g)
    if not report.ok:
        return report.detail
    if not executable:
        return None

    evaluator = GlobalEvaluator(product)
    translator = Translator(new_structure)
    point = (state_id, designated)
    family = formula_family(
        [v.name for v in structure.vocabulary], list(structure.agents), depth
    )
    for phi in family:
        symbolic = translator.fn(phi).holds(state_new)
        explicit = evaluator.satisfies(point, phi)
        if symbolic != explicit:
            return (
                f"formula {format_formula(phi)}: "
                f"symbolic {symbolic}, explicit {explicit}"
            )
    return None


def check_part_ii(
    pointed: PointedModel, action: ActionModel, designated, depth: int = 2
) -> str | None:
    """Explicit product update vs. encode-then-transform on one instance."""
    model = pointed.model
    engine = Engine()
    structure, g_m = structure_of_model(engine, model)
    transformer, actual, label = trf_with_labels(engine, action, designated)

    survives = eval_world(model, pointed.point, action.pre[designated])

    new_structure, copies = transform_with_copies(structure, transformer)
    env = structure.env()
    env.update({v.name: v for v in transformer.add_vocab})
    change_fns = {
        v: compile_formula(phi, env, engine)
        for v, phi in transformer.change_laws.items()
    }

    def g_of(state, x):
        return updated_state(transformer, copies, change_fns, state, x)

    state_new = g_of(g_m[pointed.point], actual)
    executable = new_structure.law.holds(state_new)
    if executable != survives:
        return (
            f"executability disagrees: explicit precondition is {survives}, "
            f"symbolic law check is {executable}"
        )

    product = product_update(model, action)
    g = {(w, a): g_of(g_m[w], label[a]) for (w, a) in product.worlds}
    report = check_morphism(new_structure, product, model.vocabulary, g)
    if not report.ok:
        return report.detail
    if not executable:
        return None

    evaluator = GlobalEvaluator(product)
    translator = Translator(new_structure)
    point = (pointed.point, designated)
    family = formula_family(list(model.vocabulary), list(model.agents), depth)
    for phi in family:
        symbolic = translator.fn(phi).holds(state_new)
        explicit = evaluator.satisfies(point, phi)
        if symbolic != explicit:
            return (
                f"formula {format_formula(phi)}: "
                f"symbolic {symbolic}, explicit {explicit}"
            )
    return None


def check_roundtrip(
    pointed: PointedModel, action: ActionModel, designated, depth: int = 2
) -> str | None:
    """Action -> transformer -> action: product updates must agree."""
    model = pointed.model
    engine = Engine()
    for p in model.vocabulary:
        engine.variable(p)
    transformer, actual, _ = trf_with_labels(engine, action, designated)
    action2, designated2 = act(Event(transformer, actual))
    before = eval_world(model, pointed.point, action.pre[designated])
    after = eval_world(model, pointed.point, action2.pre[designated2])
    if before != after:
        return (
            f"designated precondition disagrees after round trip: "
            f"{before} vs {after}"
        )
    if not before:
        return None
    eval1 = GlobalEvaluator(product_update(model, action))
    eval2 = GlobalEvaluator(product_update(model, action2))
    point1 = (pointed.point, designated)
    point2 = (pointed.point, designated2)
    family = formula_family(list(model.vocabulary), list(model.agents), depth)
    for phi in family:
        v1 = eval1.satisfies(point1, phi)
        v2 = eval2.satisfies(point2, phi)
        if v1 != v2:
            return (
                f"round trip differs on {format_formula(phi)}: {v1} vs {v2}"
            )
    return None


def check_translation(scene: Scene, formulas) -> str | None:
    """Epistemic truth vs. boolean translation, on every state."""
    from .symbolic import bool_translate, scene_eval

    structure = scene.structure
    for phi in formulas:
        fn = bool_translate(structure, phi)
        for state in structure.states():
            direct = scene_eval(Scene(structure, state), phi)
            if fn.holds(state) != direct:
                names = ",".join(sorted(v.name for v in state))
                return (
                    f"translation of {format_formula(phi)} disagrees at "
                    f"state {{{names}}}"
                )
    return None


def generate_formulas(seed: int, structure: BeliefStructure, count: int = 6, depth: int = 3):
    """Deterministic random formulas over the structure's vocabulary."""
    rng = random.Random(f"formula-{seed}")
    names = [v.name for v in structure.vocabulary]
    agents = sorted(structure.agents)
    return [_random_formula(rng, names, agents, depth) for _ in range(count)]


def check_minimization(seed: int, bounds: Bounds = Bounds(), depth: int = 2) -> str | None:
    """Pin one variable by the law, remove it, and compare all formulas
    over the remaining vocabulary on every state."""
    scene = generate_scene(seed, bounds)
    structure = scene.structure
    engine = structure.engine
    rng = random.Random(f"mini-{seed}")
    target = rng.choice(list(structure.vocabulary))
    pinned_law = structure.law & engine.atom(target)
    if pinned_law.is_false:
        pinned_law = structure.law & ~engine.atom(target)
    pinned = BeliefStructure(
        engine, structure.vocabulary, pinned_law, structure.observations
    )
    kept = [v for v in pinned.vocabulary if v != target]
    reduced = minimize(pinned, kept)
    before = Translator(pinned)
    after = Translator(reduced)
    family = formula_family([v.name for v in kept], sorted(structure.agents), depth)
    for phi in family:
        fn_before = before.fn(phi)
        fn_after = after.fn(phi)
        for state in pinned.states():
            if fn_before.holds(state) != fn_after.holds(state - {target}):
                names = ",".join(sorted(v.name for v in state))
                return (
                    f"minimization changes {format_formula(phi)} at "
                    f"state {{{names}}}"
                )
    return None


# -- suite runner ----------------------------------------------------------------

@dataclass
class Counterexample:
    part: str
    seed: int
    detail: str
    size: int = 0


@dataclass
class SuiteReport:
    count: int
    depth: int
    seed: int
    checked: dict[str, int] = field(default_factory=dict)
    failures: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def minimal_failure(self) -> Counterexample | None:
        if not self.failures:
            return None
        return min(self.failures, key=lambda c: (c.size, c.seed))


def run_suite(
    seed: int = 0,
    count: int = 500,
    depth: int = 2,
    bounds: Bounds = Bounds(),
    parts: Sequence[str] = ("event", "action", "roundtrip"),
) -> SuiteReport:
    """Run the equivalence checks over `count` seeded instances per part."""
    report = SuiteReport(count=count, depth=depth, seed=seed)
    for part in parts:
        report.checked[part] = 0
    for i in range(count):
        instance_seed = seed + i
        if "event" in parts:
            scene, event = generate_scene_event(instance_seed, bounds)
            detail = check_part_i(scene, event, depth)
            report.checked["event"] += 1
            if detail is not None:
                size = len(scene.structure.vocabulary) + len(
                    event.transformer.add_vocab
                )
                report.failures.append(
                    Counterexample("event", instance_seed, detail, size)
                )
        if "action" in parts:
            pointed, action, designated = generate_model_action(instance_seed, bounds)
            detail = check_part_ii(pointed, action, designated, depth)
            report.checked["action"] += 1
            if detail is not None:
                size = len(pointed.model.worlds) + len(action.events)
                report.failures.append(
                    Counterexample("action", instance_seed, detail, size)
                )
        if "roundtrip" in parts:
            pointed, action, designated = generate_model_action(instance_seed, bounds)
            detail = check_roundtrip(pointed, action, designated, depth)
            report.checked["roundtrip"] += 1
            if detail is not None:
                size = len(pointed.model.worlds) + len(action.events)
                report.failures.append(
                    Counterexample("roundtrip", instance_seed, detail, size)
                )
    return report
