"""Predimension calculus: micro-examples, invariants, and a brute oracle."""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from wplab.errors import (
    BaseNotStrong,
    GroundSetTooLarge,
    IncompatibleConfiguration,
    InvalidConfiguration,
)
from wplab.predim_engine import (
    Configuration,
    FunctionSlot,
    GroupPoint,
    chain_decompose,
    check_semimodularity,
    delta,
    grk,
    independence_certificate,
    is_intersection_compatible,
    is_strong,
    predim_dim,
    strong_hull,
    td,
    validate,
)

F = Fraction


def free_matroid(n):
    return [[F(1 if i == j else 0) for j in range(n)] for i in range(n)]


def one_exp_point(matroid=None):
    """Coordinates {b, e} with one exponential graph point."""
    return Configuration(
        ("b", "e"), matroid or free_matroid(2),
        [FunctionSlot(0, "exp")], [GroupPoint(0, "b", "e")],
    )


def test_td_examples():
    cfg = one_exp_point()
    assert td(cfg, ("b", "e"), ("b", "e")) == 0
    assert td(cfg, ("b", "e")) == 2
    dep = one_exp_point(matroid=[[F(1), F(1)]])  # equal columns
    assert td(dep, ("b", "e")) == 1


def test_grk_examples():
    cfg = one_exp_point()
    assert grk(cfg, 0, ("b", "e")) == 1
    assert grk(cfg, 0, ("b", "e"), ("b",)) == 1
    assert grk(cfg, 0, ("b", "e"), ("b", "e")) == 0


def test_grk_cm_relation():
    # sqrt(d) * p1 - p2 = 0: two CM points, one dimension
    cfg = Configuration(
        ("b1", "e1", "b2", "e2"), free_matroid(4),
        [FunctionSlot(0, "wp_cm", -1)],
        [GroupPoint(0, "b1", "e1"), GroupPoint(0, "b2", "e2")],
        {0: [[(F(0), F(1)), (F(-1), F(0))]]},
    )
    assert grk(cfg, 0, ("b1", "e1", "b2", "e2")) == 1


def test_delta_examples():
    cfg = one_exp_point()
    rep = delta(cfg, (0,), ("b", "e"))
    assert (rep.td, rep.grk_total, rep.delta) == (2, 1, 1)
    dep = one_exp_point(matroid=[[F(1), F(1)]])
    assert delta(dep, (0,), ("b", "e")).delta == 0
    assert delta(cfg, (), ("b", "e")).delta == 2  # no slots: delta = td


def test_validate_and_relation_row_invariants():
    assert validate(one_exp_point())["valid"]
    with pytest.raises(InvalidConfiguration):
        Configuration(
            ("b", "e"), free_matroid(2), [FunctionSlot(0, "exp")],
            [GroupPoint(0, "b", "e")], {0: [[F(1)]]},  # single nonzero entry
        )


def test_incompatible_relation_detected():
    # sqrt(d)-relation across points on disjoint coordinate pairs violates
    # intersection compatibility: Gamma({p1 coords}) ^ Gamma({p2 coords})
    # is 0 pointwise but the relation identifies the two lines
    cfg = Configuration(
        ("b1", "e1", "b2", "e2"), free_matroid(4),
        [FunctionSlot(0, "wp_cm", -1)],
        [GroupPoint(0, "b1", "e1"), GroupPoint(0, "b2", "e2")],
        {0: [[(F(0), F(1)), (F(-1), F(0))]]},
    )
    assert not is_intersection_compatible(cfg)
    with pytest.raises(IncompatibleConfiguration):
        check_semimodularity(cfg, ("b1", "e1"), ("b2", "e2"))


def test_compatible_relation_on_shared_pair():
    cfg = Configuration(
        ("b", "e"), free_matroid(2), [FunctionSlot(0, "exp")],
        [GroupPoint(0, "b", "e"), GroupPoint(0, "b", "e")],
        {0: [[F(1), F(-2)]]},
    )
    assert is_intersection_compatible(cfg)
    assert grk(cfg, 0, ("b", "e")) == 1  # two points modulo one relation


def test_is_strong_and_hull():
    cfg = one_exp_point(matroid=[[F(1), F(1)]])  # td({b,e}) = 1, delta = 0
    ok, witness = is_strong(cfg, ())
    assert ok and witness is None
    # two unrelated points over a td-1 pair force delta({b,e}) = 1 - 2 = -1
    dep = Configuration(
        ("b", "e", "x"),
        [[F(1), F(1), F(0)], [F(0), F(0), F(1)]],
        [FunctionSlot(0, "exp")],
        [GroupPoint(0, "b", "e"), GroupPoint(0, "b", "e")],
    )
    ok, witness = is_strong(dep, ())
    assert not ok and witness == frozenset(("b", "e"))
    hull = strong_hull(dep, ())
    ok2, _ = is_strong(dep, hull)
    assert ok2
    assert strong_hull(dep, hull) == hull  # idempotent


def test_hull_monotone_random():
    rng = random.Random(11)
    for _ in range(30):
        n = rng.randint(3, 6)
        coords = [f"c{i}" for i in range(n)]
        matroid = [[F(rng.randint(-1, 1)) for _ in range(n)]
                   for _ in range(n - 1)]
        pts = [GroupPoint(0, *rng.sample(coords, 2)) for _ in range(2)]
        cfg = Configuration(coords, matroid, [FunctionSlot(0, "exp")], pts)
        a = frozenset(c for c in coords if rng.random() < 0.4)
        a2 = a | frozenset(c for c in coords if rng.random() < 0.3)
        h1, h2 = strong_hull(cfg, a), strong_hull(cfg, a2)
        assert h1 <= h2
        assert strong_hull(cfg, h1) == h1


def test_predim_dim_and_witness():
    cfg = one_exp_point()
    dim, witness = predim_dim(cfg, ("b",), with_witness=True)
    assert dim == 1
    assert delta(cfg, (0,), witness).delta == dim
    # dim is a lower bound over every superset
    for k in range(3):
        for extra in combinations(("b", "e"), k):
            s = frozenset(("b",)) | frozenset(extra)
            assert dim <= delta(cfg, (0,), s).delta


def test_predim_dim_base_must_be_strong():
    dep = Configuration(
        ("b", "e"), [[F(1), F(1)]], [FunctionSlot(0, "exp")],
        [GroupPoint(0, "b", "e")],
    )
    # {b} is not strong: delta({b,e}/{b}) = 0 - 1 = -1
    with pytest.raises(BaseNotStrong):
        predim_dim(dep, ("e",), ("b",))


def test_chain_examples():
    cfg = one_exp_point()
    empty = chain_decompose(cfg, ("b", "e"), ("b", "e"))
    assert empty.steps == ()
    chain = chain_decompose(cfg, (), ("b", "e"))
    tags = [s.tag for s in chain.steps]
    assert tags == ["generic_singleton", "delta_zero"]
    assert [sorted(s.subset) for s in chain.steps] == [["b"], ["b", "e"]]
    assert sum(s.delta for s in chain.steps) == delta(cfg, (0,), ("b", "e")).delta


def test_strong_two_code_paths_agree():
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randint(3, 6)
        coords = [f"c{i}" for i in range(n)]
        matroid = [[F(rng.randint(-2, 2)) for _ in range(n)]
                   for _ in range(rng.randint(2, n))]
        pts = [GroupPoint(0, *rng.sample(coords, 2))
               for _ in range(rng.randint(1, 3))]
        cfg = Configuration(coords, matroid, [FunctionSlot(0, "exp")], pts)
        a = frozenset(c for c in coords if rng.random() < 0.4)
        ok, _ = is_strong(cfg, a)
        # independent path: brute minimum of delta over supersets
        free = [c for c in coords if c not in a]
        best = 0
        for k in range(1, len(free) + 1):
            for extra in combinations(free, k):
                d = delta(cfg, (0,), a | frozenset(extra), a).delta
                best = min(best, d)
        assert ok == (best >= 0)


def test_semimodularity_report_fields():
    cfg = one_exp_point()
    rep = check_semimodularity(cfg, ("b",), ("e",))
    assert rep.all_hold
    assert rep.grk_upper_semimodular and rep.td_lower_semimodular
    assert rep.delta_submodular and rep.grk_monotone


def test_ground_set_cap():
    coords = [f"c{i}" for i in range(21)]
    with pytest.raises(GroundSetTooLarge):
        Configuration(coords, free_matroid(21), [], [])


def test_certificate_withheld_when_hypotheses_fail():
    # fa is generic: it does add F1-dimension over C u a
    cfg = Configuration(
        ("a1", "e1", "fa"), free_matroid(3),
        [FunctionSlot(0, "exp"), FunctionSlot(1, "wp_generic")],
        [GroupPoint(0, "a1", "e1")],
    )
    cert = independence_certificate(cfg, (0,), (1,), ("a1", "e1"), ("fa",))
    assert not cert.hypotheses_hold
    assert not cert.certified
    assert "withheld" in cert.note
