"""Derivation spaces from finite presentations, generic and at points."""

from fractions import Fraction

import pytest
import sympy

from wplab.cintervals import ComplexBox, working_precision
from wplab.differentials import (
    GENERIC,
    NUMERIC_POINT,
    FieldPresentation,
    der_dimension,
    extend_derivation,
    f_forms,
    hcl_witness,
    omega_presentation,
    rows_rank,
)
from wplab.errors import InvalidConfiguration, SingularSpecialization

F = Fraction


def _boxes(**vals):
    with working_precision(128):
        return {k: ComplexBox.from_complex(complex(v)) for k, v in vals.items()}


def test_generic_single_generator():
    p = FieldPresentation(GENERIC, ("t",))
    assert der_dimension(p, []) == 1


def test_generic_exp_form_cuts_one_dimension():
    p = FieldPresentation(GENERIC, ("b", "e"))
    forms = f_forms(p, [(0, 0, 1, "e")])  # e db - de
    assert der_dimension(p, forms) == 1
    assert forms[0].vector[1] == sympy.Integer(-1)


def test_generic_mode_rejects_relations_and_points():
    with pytest.raises(InvalidConfiguration):
        FieldPresentation(GENERIC, ("x",), ("x**2 - 1",))
    with pytest.raises(InvalidConfiguration):
        FieldPresentation(GENERIC, ("x",), point={"x": None})


def test_numeric_relation_rows():
    pt = _boxes(x=2, y=4)
    p = FieldPresentation(NUMERIC_POINT, ("x", "y"), ("y - x**2",), pt, 128)
    rows = omega_presentation(p)
    assert len(rows) == 1
    # gradient (-2x, 1) at x = 2
    assert (rows[0][0] + 4).contains_zero()
    assert (rows[0][1] - 1).contains_zero()
    assert der_dimension(p, []) == 1


def test_numeric_relation_must_vanish():
    with pytest.raises(InvalidConfiguration):
        FieldPresentation(NUMERIC_POINT, ("x",), ("x - 3",), _boxes(x=2), 128)


def test_cusp_is_singular():
    # y^2 - x^3 at the origin: zero gradient, no certified row
    pt = _boxes(x=0, y=0)
    p = FieldPresentation(NUMERIC_POINT, ("x", "y"), ("y**2 - x**3",), pt, 128)
    with pytest.raises(SingularSpecialization):
        omega_presentation(p)


def test_numeric_chain_rule_dimension():
    # y = x^2 with the matching graph form is one condition, not two
    pt = _boxes(x=2, y=4)
    p = FieldPresentation(NUMERIC_POINT, ("x", "y"), ("y - x**2",), pt, 128)
    forms = f_forms(p, [(None, 0, 1, F(4))])  # f'(2) = 4
    assert der_dimension(p, forms) == 1
    off = f_forms(p, [(None, 0, 1, F(3))])
    assert der_dimension(p, off) == 0


def test_extend_unique_family_inconsistent():
    p = FieldPresentation(GENERIC, ("b", "e"))
    forms = f_forms(p, [(0, 0, 1, F(5))])
    res = extend_derivation(p, forms, {"b": 1})
    assert res.kind == "unique"
    assert res.assignment["e"] == 5
    fam = extend_derivation(p, forms, {})
    assert fam.kind == "family" and fam.dimension == 1
    clash = extend_derivation(p, forms, {"b": 1, "e": 6})
    assert clash.kind == "inconsistent"
    assert clash.certificate_row is not None


def test_extend_with_target():
    p = FieldPresentation(GENERIC, ("a", "b"))
    res = extend_derivation(p, [], {}, target=("b", 7))
    assert res.kind == "family" and res.dimension == 2
    assert res.assignment["b"] == 7


def test_extend_numeric():
    pt = _boxes(x=2, y=4)
    p = FieldPresentation(NUMERIC_POINT, ("x", "y"), ("y - x**2",), pt, 128)
    res = extend_derivation(p, [], {"x": 1})
    assert res.kind == "unique"
    assert (res.assignment["y"] - 4).contains_zero()  # dy = 2x dx
    clash = extend_derivation(p, [], {"x": 1, "y": 3})
    assert clash.kind == "inconsistent"


def test_hcl_witness_generic():
    p = FieldPresentation(GENERIC, ("b", "e"))
    forms = f_forms(p, [(0, 0, 1, "e")])
    v = hcl_witness(p, forms, 0)
    assert not v.in_closure
    assert v.witness["b"] == 1


def test_hcl_witness_numeric_closure():
    # x is determined by the relations: every derivation kills it
    pt = _boxes(x=2, y=4, z=8)
    p = FieldPresentation(
        NUMERIC_POINT, ("x", "y", "z"),
        ("y - x**2", "z - x**3", "z - 2*y"), pt, 128,
    )
    v = hcl_witness(p, [], 0)
    assert v.in_closure


def test_symbolic_annihilation_matches_rank():
    p = FieldPresentation(GENERIC, ("a", "e", "t"))
    forms = f_forms(p, [(0, 0, 1, "e")])
    assert rows_rank(p, [list(f.vector) for f in forms]) == 1
    assert der_dimension(p, forms) == 2
