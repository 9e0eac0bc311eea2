import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowlab.provability import (
    BOT,
    TOP,
    Box,
    DecisionBudgetExceeded,
    FrameError,
    Imp,
    InvalidConjunct,
    KripkeModel,
    Not,
    PVar,
    ProofLine,
    ProofObject,
    brute_force_countermodel,
    check_proof,
    conjunction_closure,
    extension_hierarchy,
    fixed_point_lambda,
    gl_decide,
    lob_instance,
    parse_modal,
    proof_corpus,
    random_modal,
    show,
)
from flowlab.provability.formulas import And
from flowlab.provability.proofs import is_tautology, proof_of_boxed_identity, proof_of_top
from flowlab.provability.theorems import con, consistency_unprovable

P = parse_modal
p, q = PVar("p"), PVar("q")


def test_proof_examples():
    assert check_proof(proof_of_top()).valid
    assert proof_of_top().conclusion == TOP
    assert check_proof(proof_of_boxed_identity()).valid
    bad = ProofObject((
        ProofLine(P("p -> p"), "taut"),
        ProofLine(P("q -> r"), "taut"),
        ProofLine(P("r"), "mp", (1, 2)),
    ))
    res = check_proof(bad)
    assert not res.valid and res.line == 2
    bad_mp = ProofObject((
        ProofLine(P("p -> p"), "taut"),
        ProofLine(P("(q -> q) -> true"), "taut"),
        ProofLine(TOP, "mp", (1, 2)),
    ))
    assert check_proof(bad_mp).line == 3
    forward = ProofObject((ProofLine(P("p -> p"), "taut"), ProofLine(P("box(p -> p)"), "nec", (3,))))
    assert check_proof(forward).line == 2
    assert not check_proof(ProofObject(())).valid


def test_rule_schemas():
    ok = ProofObject((
        ProofLine(P("box(p -> q) -> (box p -> box q)"), "K"),
        ProofLine(P("box(box p -> p) -> box p"), "GL"),
    ))
    assert check_proof(ok).valid
    wrong = ProofObject((ProofLine(P("box(box p -> q) -> box p"), "GL"),))
    assert check_proof(wrong).line == 1
    assert is_tautology(P("box p | !box p"))
    assert not is_tautology(P("box p -> p"))


def test_corpus_sound():
    corpus = proof_corpus(100, seed=3)
    assert len(corpus) == 100
    for proof in corpus:
        assert check_proof(proof).valid
        assert gl_decide(proof.conclusion).valid


def test_basic_schemas():
    assert gl_decide(P("box(p -> q) -> (box p -> box q)")).valid
    assert gl_decide(P("box p -> box box p")).valid
    assert not gl_decide(P("box p -> p")).valid
    assert not gl_decide(P("box false")).valid


def test_consistency_has_dead_end_countermodel():
    d = consistency_unprovable()
    assert not d.valid
    m = d.countermodel
    assert len(m.worlds) == 1 and not m.relation
    assert m.holds(Box(BOT), d.world) and not m.holds(d.formula, d.world)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_lob_instances_valid(seed):
    phi = random_modal(np.random.default_rng(seed), 4)
    assert gl_decide(lob_instance(phi)).valid


def test_lob_simple():
    assert gl_decide(lob_instance(BOT)).valid
    assert gl_decide(lob_instance(p)).valid
    assert show(lob_instance(p)) == show(P("box(box p -> p) -> box p"))


def test_fixed_point_lambda():
    fp = fixed_point_lambda()
    assert fp.formula == TOP and fp.certified
    # without boxing the hypothesis uniqueness fails: a world with a dead-end successor
    assert not fp.unboxed_probe.valid
    cm = fp.unboxed_probe.decision.countermodel
    assert not cm.holds(fp.unboxed_probe.formula, fp.unboxed_probe.decision.world)


def test_conjunction_closure():
    k = P("box(p -> q) -> (box p -> box q)")
    four = P("box p -> box box p")
    lob = lob_instance(q)
    assert conjunction_closure([k, four, lob]).decision.valid
    assert conjunction_closure([]).formula == TOP
    with pytest.raises(InvalidConjunct) as e:
        conjunction_closure([k, P("box p -> p"), four])
    assert e.value.index == 1
    assert e.value.decision.countermodel is not None


def test_hierarchy():
    reps = extension_hierarchy(3)
    assert [r.level.index for r in reps] == [0, 1, 2]
    for r in reps:
        assert r.ok
        assert r.next_derives_con and not r.derives_con
        assert r.witness.holds(r.level.premise(), 0) and not r.witness.holds(con(r.level.index), 0)
    assert set(reps[1].level.extra_axioms) <= set(reps[2].level.extra_axioms)
    assert extension_hierarchy(0) == []
    with pytest.raises(ValueError):
        extension_hierarchy(9)


def test_dual_oracle_agreement():
    rng = np.random.default_rng(11)
    for _ in range(200):
        f = random_modal(rng, 3)
        d = gl_decide(f)
        assert d.valid == (brute_force_countermodel(f, 4) is None)
        if not d.valid:
            assert not d.countermodel.holds(f, d.world)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_theorems_closed_under_rules(seed):
    rng = np.random.default_rng(seed)
    a, b = random_modal(rng, 3), random_modal(rng, 3)
    if gl_decide(a).valid:
        assert gl_decide(Box(a)).valid
        if gl_decide(Imp(a, b)).valid:
            assert gl_decide(b).valid


def test_limits():
    with pytest.raises(DecisionBudgetExceeded):
        gl_decide(lob_instance(random_modal(np.random.default_rng(0), 5)), budget=1)
    many = And(PVar("a0"), PVar("a1"))
    for i in range(2, 17):
        many = And(many, PVar(f"a{i}"))
    with pytest.raises(DecisionBudgetExceeded):
        gl_decide(many)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_printer_round_trip(seed):
    f = random_modal(np.random.default_rng(seed), 4)
    assert parse_modal(show(f)) == f


def test_frame_validation():
    with pytest.raises(FrameError):
        KripkeModel((0,), frozenset({(0, 0)}), {})
    with pytest.raises(FrameError):
        KripkeModel.from_edges(3, [(0, 1), (1, 2)], {}, close=False)
    m = KripkeModel.from_edges(3, [(0, 1), (1, 2)], {2: {"p"}})
    assert (0, 2) in m.relation
    assert m.holds(Box(p), 1) and not m.holds(Box(p), 0)
    assert m.holds(Not(Box(BOT)), 0) and m.holds(Box(BOT), 2)
