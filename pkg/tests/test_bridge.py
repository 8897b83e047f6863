"""Bridge tests: event/action translations, morphism checks, the harness.

The coin flip is traced through both directions of the translation and
pinned against the explicit action model.  The harness tests include a
deliberately broken update (observations conjoined without snapshot
renaming) to show the morphism check actually has teeth.
"""

import pytest

from symdel.boolfun import Engine
from symdel.bridge import (
    Bounds,
    Counterexample,
    MorphismReport,
    SuiteReport,
    act,
    apply_event_quiet,
    check_minimization,
    check_morphism,
    check_part_i,
    check_part_ii,
    check_roundtrip,
    check_translation,
    formula_family,
    generate_formulas,
    generate_model_action,
    generate_scene,
    generate_scene_event,
    run_suite,
    trf,
    trf_with_labels,
)
from symdel.errors import NotExecutable, VocabularyError
from symdel.explicit import (
    ActionModel,
    KripkeModel,
    PointedModel,
    format_model,
    model_of_structure,
    product_update,
)
from symdel.language import BOT, TOP, Atom, Not, compile_formula, parse
from symdel.symbolic import (
    BeliefStructure,
    Event,
    Scene,
    Transformer,
    transform_with_copies,
    updated_state,
)


def coin_scene(engine: Engine) -> Scene:
    p = engine.variable("p")
    watch = engine.atom(p).iff(engine.atom(engine.primed(p)))
    structure = BeliefStructure(
        engine, (p,), engine.atom(p), {"a": watch, "b": watch}
    )
    return Scene(structure, frozenset({p}))


def coin_event(engine: Engine) -> Event:
    q = engine.variable("q")
    p = engine.variable("p")
    return Event(
        Transformer(
            add_vocab=(q,),
            event_law=TOP,
            modified=(p,),
            change_laws={p: Atom("q")},
            event_obs={
                "a": engine.true,
                "b": engine.atom(q).iff(engine.atom(engine.primed(q))),
            },
        ),
        frozenset({q}),
    )


def coin_kripke() -> KripkeModel:
    return KripkeModel(
        vocabulary=("p",),
        worlds=("w",),
        relations={"a": {("w", "w")}, "b": {("w", "w")}},
        valuation={"w": {"p"}},
    )


def flip_action() -> ActionModel:
    events = ("a1", "a2")
    return ActionModel(
        events=events,
        relations={
            "a": {(e, f) for e in events for f in events},
            "b": {(e, e) for e in events},
        },
        pre={},
        post={"a1": {"p": BOT}, "a2": {"p": TOP}},
    )


# -- event -> action -----------------------------------------------------------

def test_act_coin_event_gives_the_flip_action():
    engine = Engine()
    action, designated = act(coin_event(engine))
    hidden = frozenset()
    shown = frozenset({"q"})
    assert action.events == (hidden, shown)
    assert designated == shown
    assert action.pre == {hidden: TOP, shown: TOP}
    assert action.post == {hidden: {"p": BOT}, shown: {"p": TOP}}
    assert action.relations["a"] == frozenset(
        (x, y) for x in action.events for y in action.events
    )
    assert action.relations["b"] == frozenset((x, x) for x in action.events)

    updated = product_update(coin_kripke(), action)
    assert updated.valuation[("w", hidden)] == frozenset()
    assert updated.valuation[("w", shown)] == frozenset({"p"})


def test_act_event_order_counts_in_binary():
    # the first event variable is the least significant bit
    engine = Engine()
    x1, x2 = engine.variable("x1"), engine.variable("x2")
    event = Event(
        Transformer((x1, x2), TOP, event_obs={"a": engine.true}),
        frozenset({x2}),
    )
    action, designated = act(event)
    assert action.events == (
        frozenset(),
        frozenset({"x1"}),
        frozenset({"x2"}),
        frozenset({"x1", "x2"}),
    )
    assert designated == frozenset({"x2"})


def test_act_substitutes_event_variables_into_laws():
    engine = Engine()
    x = engine.variable("x")
    p = engine.variable("p")
    event = Event(
        Transformer(
            (x,),
            parse("x -> [a] p"),
            (p,),
            {p: parse("p & ~x")},
            {"a": engine.true},
        ),
        frozenset(),
    )
    action, designated = act(event)
    assert designated == frozenset()
    assert action.pre[frozenset()] == parse("Bot -> [a] p")
    assert action.pre[frozenset({"x"})] == parse("Top -> [a] p")
    assert action.post[frozenset()] == {"p": parse("p & ~Bot")}
    assert action.post[frozenset({"x"})] == {"p": parse("p & ~Top")}


def test_act_without_event_variables_is_a_single_event():
    engine = Engine()
    event = Event(
        Transformer((), parse("[b] p"), event_obs={"b": engine.true}),
        frozenset(),
    )
    action, designated = act(event)
    assert action.events == (frozenset(),)
    assert action.pre[frozenset()] == parse("[b] p")
    assert designated == frozenset()


# -- action -> event -----------------------------------------------------------

def test_trf_flip_action_matches_the_coin_transformer():
    engine = Engine()
    for prop in ("p",):
        engine.variable(prop)
    transformer, actual, label = trf_with_labels(engine, flip_action(), "a2")

    assert len(transformer.add_vocab) == 1
    q1 = transformer.add_vocab[0]
    assert q1.name == "q1"
    assert label == {"a1": frozenset(), "a2": frozenset({q1})}
    assert actual == frozenset({q1})

    p = engine.variable("p")
    assert transformer.modified == (p,)
    env = {"p": p, "q1": q1}
    law_fn = compile_formula(transformer.event_law, env, engine)
    assert law_fn.is_true
    change_fn = compile_formula(transformer.change_laws[p], env, engine)
    assert change_fn == engine.atom(q1)
    assert transformer.event_obs["a"].is_true
    assert transformer.event_obs["b"] == engine.atom(q1).iff(
        engine.atom(engine.primed(q1))
    )


def test_trf_single_event_action_needs_no_labels():
    engine = Engine()
    engine.variable("p")
    announce = ActionModel(
        ("e",), {"a": {("e", "e")}}, {"e": parse("[a] p")}
    )
    transformer, actual = trf(engine, announce, "e")
    assert transformer.add_vocab == ()
    assert actual == frozenset()
    assert transformer.modified == ()
    assert transformer.event_law == parse("[a] p")
    assert transformer.event_obs["a"].is_true


def test_trf_unknown_designated_event():
    engine = Engine()
    with pytest.raises(VocabularyError):
        trf(engine, flip_action(), "a3")


def test_changed_props_is_syntactic():
    # writing p back unchanged does not count as a modification, while a
    # differently spelled equivalent does
    frozen = ActionModel(("e",), {}, {}, {"e": {"p": Atom("p")}})
    assert frozen.changed_props() == ()
    spelled = ActionModel(("e",), {}, {}, {"e": {"p": Not(Not(Atom("p")))}})
    assert spelled.changed_props() == ("p",)

    engine = Engine()
    p = engine.variable("p")
    transformer, _ = trf(engine, spelled, "e")
    assert transformer.modified == (p,)
    change_fn = compile_formula(transformer.change_laws[p], {"p": p}, engine)
    assert change_fn == engine.atom(p)


# -- morphism ------------------------------------------------------------------

def _identity_g(structure):
    var_of = structure.env()
    return {
        frozenset(v.name for v in s): s for s in structure.states()
    }, var_of


def test_check_morphism_accepts_the_state_model():
    engine = Engine()
    structure = coin_scene(engine).structure
    model = model_of_structure(structure)
    g = {w: frozenset(structure.env()[p] for p in w) for w in model.worlds}
    report = check_morphism(structure, model, ("p",), g)
    assert report.ok
    assert report.detail == ""


def test_check_morphism_rejects_each_condition():
    engine = Engine()
    p = engine.variable("p")
    fp = engine.atom(p)
    watch = fp.iff(engine.atom(engine.primed(p)))
    structure = BeliefStructure(engine, (p,), engine.true, {"a": watch})
    states = {frozenset(): frozenset(), frozenset({"p"}): frozenset({p})}
    worlds = tuple(states)
    good_rel = frozenset((w, w) for w in worlds)
    valuation = {w: w for w in worlds}

    model = KripkeModel(("p",), worlds, {"a": good_rel}, valuation)
    assert check_morphism(structure, model, ("p",), states).ok

    # C1: an edge the observation function rejects
    cross = KripkeModel(
        ("p",), worlds, {"a": good_rel | {worlds}}, valuation
    )
    report = check_morphism(structure, cross, ("p",), states)
    assert not report.ok and "C1" in report.detail

    # C2: the map contradicts the valuation on a shared atom
    swapped = {worlds[0]: states[worlds[1]], worlds[1]: states[worlds[0]]}
    report = check_morphism(structure, model, ("p",), swapped)
    assert not report.ok and "C2" in report.detail

    # C3: a state without preimage
    half = KripkeModel(
        ("p",), worlds[:1], {"a": frozenset({(worlds[0], worlds[0])})},
        {worlds[0]: worlds[0]},
    )
    report = check_morphism(structure, half, ("p",), states)
    assert not report.ok and "C3" in report.detail

    # C3 the other way: an image that is not a state
    law_p = BeliefStructure(engine, (p,), fp, {"a": watch})
    only_p = KripkeModel(
        ("p",), (worlds[1],), {"a": frozenset({(worlds[1], worlds[1])})},
        {worlds[1]: worlds[1]},
    )
    bad_image = {worlds[1]: frozenset()}
    report = check_morphism(law_p, only_p, (), bad_image)
    assert not report.ok and "C3" in report.detail

    # map not even defined or out of vocabulary
    report = check_morphism(structure, model, ("p",), {})
    assert not report.ok and "undefined" in report.detail
    q = engine.variable("q")
    stray = {w: frozenset({q}) for w in worlds}
    report = check_morphism(structure, model, ("p",), stray)
    assert not report.ok and "vocabulary" in report.detail


def _broken_part_i(scene, event) -> MorphismReport:
    """check_part_i with a sabotaged update: the observation functions are
    conjoined with the event observations without renaming the modified
    variables to their snapshots."""
    structure = scene.structure
    engine = structure.engine
    transformer = event.transformer
    model = model_of_structure(structure)
    action, _ = act(event)
    new_structure, copies = transform_with_copies(structure, transformer)
    broken = BeliefStructure(
        engine,
        new_structure.vocabulary,
        new_structure.law,
        {
            agent: structure.observations[agent] & transformer.event_obs[agent]
            for agent in structure.agents
        },
    )
    env = structure.env()
    env.update({v.name: v for v in transformer.add_vocab})
    change_fns = {
        v: compile_formula(phi, env, engine)
        for v, phi in transformer.change_laws.items()
    }
    product = product_update(model, action)
    var_of = structure.env()
    xvar_of = {v.name: v for v in transformer.add_vocab}
    g = {
        (w, a): updated_state(
            transformer,
            copies,
            change_fns,
            frozenset(var_of[n] for n in w),
            frozenset(xvar_of[n] for n in a),
        )
        for (w, a) in product.worlds
    }
    return check_morphism(broken, product, model.vocabulary, g)


def test_skipping_the_snapshot_renaming_is_caught():
    engine = Engine()
    report = _broken_part_i(coin_scene(engine), coin_event(engine))
    assert not report.ok
    assert "C1" in report.detail

    caught = 0
    for seed in range(50):
        scene, event = generate_scene_event(seed)
        if not _broken_part_i(scene, event).ok:
            caught += 1
    assert caught >= 10


# -- the full agreement checks on the worked example -----------------------------

def test_part_i_on_the_coin_flip():
    engine = Engine()
    assert check_part_i(coin_scene(engine), coin_event(engine)) is None


def test_part_ii_and_roundtrip_on_the_flip_action():
    pointed = PointedModel(coin_kripke(), "w")
    assert check_part_ii(pointed, flip_action(), "a2") is None
    assert check_part_ii(pointed, flip_action(), "a1") is None
    assert check_roundtrip(pointed, flip_action(), "a2") is None


# -- formula family ---------------------------------------------------------------

def test_formula_family_counts():
    atoms = ("p", "q", "r", "u")
    agents = ("a", "b")
    family = formula_family(atoms, agents, depth=2)
    assert len(family) == 378
    assert len(set(family)) == len(family)
    assert family[0] == TOP
    shallow = formula_family(atoms, agents, depth=0)
    assert len(shallow) == 18


# -- generators -------------------------------------------------------------------

def test_generate_scene_is_deterministic_and_bounded():
    small = Bounds(max_vocab=2, max_agents=1)
    for seed in range(20):
        scene = generate_scene(seed)
        again = generate_scene(seed)
        assert format_model(model_of_structure(scene.structure)) == format_model(
            model_of_structure(again.structure)
        )
        assert scene.state == {
            scene.structure.env()[v.name] for v in again.state
        }
        assert 1 <= len(scene.structure.vocabulary) <= 4
        assert 1 <= len(scene.structure.agents) <= 2
        assert scene.structure.law.holds(scene.state)

        tiny = generate_scene(seed, small)
        assert len(tiny.structure.vocabulary) <= 2
        assert len(tiny.structure.agents) == 1


def test_generate_scene_event_is_mostly_executable():
    executable = 0
    for seed in range(100):
        scene, event = generate_scene_event(seed)
        assert set(event.transformer.event_obs) == set(scene.structure.agents)
        try:
            apply_event_quiet(scene, event)
            executable += 1
        except NotExecutable:
            pass
    assert executable >= 95


def test_generate_model_action_prefers_surviving_points():
    from symdel.explicit import eval_world

    surviving = 0
    for seed in range(100):
        pointed, action, designated = generate_model_action(seed)
        assert designated in action.pre
        assert len(pointed.model.worlds) <= 6
        assert len(action.events) <= 3
        if eval_world(pointed.model, pointed.point, action.pre[designated]):
            surviving += 1
    assert surviving >= 90


# -- random structure checks --------------------------------------------------------

def test_translation_agrees_on_random_structures():
    for seed in range(20):
        scene = generate_scene(seed)
        formulas = generate_formulas(seed, scene.structure)
        assert check_translation(scene, formulas) is None, seed


def test_minimization_preserves_truth_on_random_structures():
    for seed in range(10):
        assert check_minimization(seed) is None, seed


# -- suite runner ---------------------------------------------------------------------

def test_run_suite_small():
    report = run_suite(seed=0, count=25)
    assert report.ok
    assert report.checked == {"event": 25, "action": 25, "roundtrip": 25}
    assert report.minimal_failure() is None


def test_run_suite_selected_parts():
    report = run_suite(seed=7, count=5, parts=("event",))
    assert report.checked == {"event": 5}
    assert report.ok


def test_suite_report_minimal_failure_ordering():
    report = SuiteReport(count=3, depth=2, seed=0)
    report.failures = [
        Counterexample("event", seed=5, detail="big", size=9),
        Counterexample("event", seed=9, detail="small", size=2),
        Counterexample("action", seed=3, detail="also small", size=2),
    ]
    best = report.minimal_failure()
    assert best is not None
    assert (best.size, best.seed) == (2, 3)
    assert not report.ok
