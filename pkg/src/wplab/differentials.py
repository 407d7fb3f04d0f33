"""Finite presentations of differential modules and derivation spaces.

A FieldPresentation gives generators g1..gm over a base, either Generic
(no relations; exact rational-function arithmetic in the coefficients) or
NumericPoint (polynomial relations whose Jacobian rows are evaluated at a
certified point as complex rectangles).  On top of it:

  * omega_presentation: the relation differentials as rows in the dg-basis;
  * f_forms: the function-graph forms  f'(b) db - d(f(b));
  * der_dimension: dim of the common annihilator = m - rank(rows);
  * extend_derivation: unique / one-parameter / inconsistent extension of a
    boundary assignment, with an explicit certificate row on failure;
  * hcl_witness: either "the coordinate is forced to derivative zero" or an
    explicit derivation with derivative 1 there.

Numeric rank uses interval-certified pivoting: a pivot is accepted only when
its rectangle excludes zero, and rows left over after elimination must all
enclose zero; anything else raises RankNotCertified rather than letting a
tolerance decide.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import sympy

from .cintervals import ComplexBox, working_precision
from .errors import (
    InvalidConfiguration,
    RankNotCertified,
    SingularSpecialization,
)

GENERIC = "generic"
NUMERIC_POINT = "numeric_point"


def _sympify(expr, symbols):
    if isinstance(expr, (int, Fraction)):
        return sympy.Rational(expr)
    if isinstance(expr, str):
        return sympy.sympify(expr, locals={s.name: s for s in symbols})
    return sympy.sympify(expr)


@dataclass(frozen=True)
class FieldPresentation:
    """Generators and relations presenting an extension B over a base C."""

    mode: str
    generators: tuple
    relations: tuple = ()
    point: Optional[dict] = None
    precision: int = 128

    def __post_init__(self):
        if self.mode not in (GENERIC, NUMERIC_POINT):
            raise InvalidConfiguration(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(set(self.generators)) != len(self.generators):
            raise InvalidConfiguration("duplicate generator names")
        syms = self.symbols
        rels = tuple(_sympify(r, syms) for r in self.relations)
        object.__setattr__(self, "relations", rels)
        if self.mode == GENERIC:
            if rels:
                raise InvalidConfiguration(
                    "generic mode presents a purely transcendental extension; "
                    "relations require numeric_point mode"
                )
            if self.point is not None:
                raise InvalidConfiguration("generic mode takes no point")
        else:
            if self.point is None or set(self.point) != set(self.generators):
                raise InvalidConfiguration(
                    "numeric_point mode needs a value for every generator"
                )
            self._check_relations_vanish()

    @property
    def symbols(self):
        return tuple(sympy.Symbol(g) for g in self.generators)

    @property
    def m(self) -> int:
        return len(self.generators)

    def _check_relations_vanish(self):
        with working_precision(self.precision):
            for rel in self.relations:
                val = _eval_box(rel, self.generators, self.point)
                if not val.contains_zero():
                    raise InvalidConfiguration(
                        f"relation {rel} does not vanish at the point"
                    )


def _eval_box(expr, names, point) -> ComplexBox:
    """Evaluate a sympy polynomial at boxed generator values."""
    expr = sympy.expand(expr)
    out = ComplexBox(0)
    poly = sympy.Poly(expr, *[sympy.Symbol(n) for n in names]) \
        if not expr.is_number else None
    if poly is None:
        return ComplexBox(Fraction(sympy.Rational(expr)))
    for monom, coeff in poly.terms():
        term = ComplexBox(Fraction(sympy.Rational(coeff)))
        for name, power in zip(names, monom):
            if power:
                term = term * point[name].pow_int(power)
        out = out + term
    return out


@dataclass(frozen=True)
class FForm:
    """The form f'(b) db - d f(b) as a coefficient vector over dg1..dgm."""

    slot: Optional[int]
    b_index: int
    fb_index: int
    fprime: object
    vector: tuple


# -- row construction --------------------------------------------------------

def omega_presentation(p: FieldPresentation):
    """Rows spanning the relation differentials in the dg-basis."""
    syms = p.symbols
    rows = []
    if p.mode == GENERIC:
        return rows
    with working_precision(p.precision):
        for rel in p.relations:
            row = [
                _eval_box(sympy.diff(rel, s), p.generators, p.point)
                for s in syms
            ]
            if all(entry.contains_zero() for entry in row):
                raise SingularSpecialization(
                    f"the gradient of {rel} is not certified nonzero at "
                    "the point (every entry encloses zero)"
                )
            rows.append(row)
    return rows


def f_forms(p: FieldPresentation, points: Sequence[tuple]):
    """One FForm per (slot, b_index, fb_index, fprime) tuple; fprime is an
    exact expression in the generators (Generic) or a box (NumericPoint)."""
    out = []
    for slot, b_idx, fb_idx, fprime in points:
        if not (0 <= b_idx < p.m and 0 <= fb_idx < p.m):
            raise InvalidConfiguration("form indices out of range")
        if p.mode == GENERIC:
            fp = _sympify(fprime, p.symbols)
            vec = [sympy.Integer(0)] * p.m
            vec[b_idx] += fp
            vec[fb_idx] += sympy.Integer(-1)
        else:
            if isinstance(fprime, ComplexBox):
                fp = fprime
            elif isinstance(fprime, complex):
                fp = ComplexBox.from_complex(fprime)
            else:
                fp = ComplexBox(Fraction(fprime))
            vec = [ComplexBox(0)] * p.m
            vec[b_idx] = vec[b_idx] + fp
            vec[fb_idx] = vec[fb_idx] - 1
        out.append(FForm(slot, b_idx, fb_idx, fprime, tuple(vec)))
    return out


def _all_rows(p: FieldPresentation, forms):
    rows = [list(r) for r in omega_presentation(p)]
    rows += [list(f.vector) for f in forms]
    return rows


# -- certified rank ----------------------------------------------------------

def _generic_rank(rows, m) -> int:
    if not rows:
        return 0
    mat = sympy.Matrix([[sympy.simplify(e) for e in r] for r in rows])
    return mat.rank()


def _numeric_rref(rows, m):
    """Interval Gaussian elimination.  Returns (pivot column list, reduced
    rows); every accepted pivot excludes zero and every fully processed
    leftover row must enclose zero in all entries."""
    work = [list(r) for r in rows]
    pivots = []
    pivot_rows = []
    r = 0
    for col in range(m):
        best = None
        best_mag = None
        for i in range(r, len(work)):
            e = work[i][col]
            if not e.contains_zero():
                mag = abs(e.mid())
                if best is None or mag > best_mag:
                    best, best_mag = i, mag
        if best is None:
            continue
        work[r], work[best] = work[best], work[r]
        piv = work[r][col]
        for i in range(len(work)):
            if i == r:
                continue
            factor = work[i][col] / piv
            work[i] = [work[i][j] - factor * work[r][j] for j in range(m)]
        pivots.append(col)
        pivot_rows.append(work[r])
        r += 1
    for i in range(r, len(work)):
        for e in work[i]:
            if not e.contains_zero():
                raise RankNotCertified(
                    "a leftover row is certified nonzero but no pivot "
                    "column excludes zero; raise the working precision"
                )
    return pivots, work[:r]


def _numeric_rank(rows, m) -> int:
    pivots, _ = _numeric_rref(rows, m)
    return len(pivots)


def rows_rank(p: FieldPresentation, rows) -> int:
    if p.mode == GENERIC:
        return _generic_rank(rows, p.m)
    with working_precision(p.precision):
        return _numeric_rank(rows, p.m)


def der_dimension(p: FieldPresentation, forms) -> int:
    """dim of the derivations annihilating all relation and form rows."""
    return p.m - rows_rank(p, _all_rows(p, forms))


# -- derivation extension ----------------------------------------------------

@dataclass(frozen=True)
class ExtensionResult:
    kind: str  # "unique" | "family" | "inconsistent"
    assignment: Optional[dict] = None
    dimension: int = 0
    certificate_row: Optional[tuple] = None


def _solve_generic(p, rows, fixed, target):
    syms = list(p.symbols)
    unknowns = [sympy.Symbol(f"_d_{g}") for g in p.generators]
    eqs = []
    for row in rows:
        eqs.append(sum(c * u for c, u in zip(row, unknowns)))
    for name, value in fixed.items():
        eqs.append(unknowns[p.generators.index(name)] - _sympify(value, syms))
    a_mat, b_vec = sympy.linear_eq_to_matrix(eqs, unknowns)
    aug = a_mat.row_join(-b_vec)
    red, piv = aug.rref()
    n = len(unknowns)
    for i in range(red.rows):
        if all(sympy.simplify(red[i, j]) == 0 for j in range(n)) and \
                sympy.simplify(red[i, n]) != 0:
            return ExtensionResult(
                "inconsistent",
                certificate_row=tuple(red.row(i)),
            )
    dim = n - sum(1 for c in piv if c < n)
    eqs_t = list(eqs)
    if target is not None:
        name, value = target
        eqs_t.append(unknowns[p.generators.index(name)] - _sympify(value, syms))
    sol = sympy.linsolve(eqs_t, unknowns)
    if not sol:
        return ExtensionResult(
            "inconsistent",
            certificate_row=("target incompatible with the row space",),
        )
    particular = next(iter(sol))
    subs = {u: 0 for u in particular.free_symbols
            if str(u).startswith("_d_") or str(u).startswith("tau")}
    assignment = {
        g: sympy.simplify(v.subs(subs))
        for g, v in zip(p.generators, particular)
    }
    if dim == 0:
        return ExtensionResult("unique", assignment)
    return ExtensionResult("family", assignment, dim)


def _solve_numeric(p, rows, fixed, target):
    with working_precision(p.precision):
        m = p.m
        sys_rows = []
        for row in rows:
            sys_rows.append(list(row) + [ComplexBox(0)])
        for name, value in fixed.items():
            row = [ComplexBox(0)] * (m + 1)
            row[p.generators.index(name)] = ComplexBox(1)
            row[m] = value if isinstance(value, ComplexBox) else ComplexBox(
                Fraction(value))
            sys_rows.append(row)
        dim = m - _numeric_rank([r[:m] for r in sys_rows], m)
        if target is not None:
            name, value = target
            row = [ComplexBox(0)] * (m + 1)
            row[p.generators.index(name)] = ComplexBox(1)
            row[m] = value if isinstance(value, ComplexBox) else ComplexBox(
                Fraction(value))
            sys_rows.append(row)
        pivots, red = _numeric_rref(sys_rows, m + 1)
        if m in pivots:
            for row in red:
                if all(row[j].contains_zero() for j in range(m)):
                    return ExtensionResult(
                        "inconsistent", certificate_row=tuple(row)
                    )
            raise RankNotCertified("inconsistency row not isolated")
        # back-substitute with free unknowns set to zero
        values = [ComplexBox(0)] * m
        for pos in range(len(pivots) - 1, -1, -1):
            col = pivots[pos]
            row = red[pos]
            acc = row[m]
            for j in range(col + 1, m):
                acc = acc - row[j] * values[j]
            values[col] = acc / row[col]
        assignment = {g: values[i] for i, g in enumerate(p.generators)}
        if dim == 0:
            return ExtensionResult("unique", assignment)
        return ExtensionResult("family", assignment, dim)


def extend_derivation(p: FieldPresentation, forms, boundary: dict,
                      target: Optional[tuple] = None) -> ExtensionResult:
    """Extend a boundary assignment (values on a sub-presentation's
    generators) to a derivation annihilating all rows.  Unique when the
    residual solution space is 0-dimensional, Family(dim) with a particular
    solution honoring the optional target (generator, value), Inconsistent
    with a certificate row otherwise.  The reported dimension never counts
    the target equation."""
    rows = _all_rows(p, forms)
    for name in boundary:
        if name not in p.generators:
            raise InvalidConfiguration(f"boundary names unknown {name!r}")
    if target is not None and target[0] not in p.generators:
        raise InvalidConfiguration(f"target names unknown {target[0]!r}")
    if p.mode == GENERIC:
        return _solve_generic(p, rows, boundary, target)
    return _solve_numeric(p, rows, boundary, target)


# -- holomorphic-closure witness ---------------------------------------------

@dataclass(frozen=True)
class HclVerdict:
    in_closure: bool
    witness: Optional[dict] = None


def hcl_witness(p: FieldPresentation, forms, b_index: int) -> HclVerdict:
    """InClosure iff every annihilating derivation kills generator b_index;
    otherwise an explicit derivation normalized to derivative 1 there."""
    if not 0 <= b_index < p.m:
        raise InvalidConfiguration("b_index out of range")
    rows = _all_rows(p, forms)
    unit = [0] * p.m
    unit[b_index] = 1
    if p.mode == GENERIC:
        unit_row = [sympy.Integer(x) for x in unit]
        base = rows_rank(p, rows)
        lifted = rows_rank(p, rows + [unit_row])
        if lifted == base:
            return HclVerdict(True)
        res = _solve_generic(p, rows, {}, (p.generators[b_index], 1))
    else:
        unit_row = [ComplexBox(x) for x in unit]
        with working_precision(p.precision):
            base = _numeric_rank(rows, p.m)
            lifted = _numeric_rank(rows + [unit_row], p.m)
        if lifted == base:
            return HclVerdict(True)
        res = _solve_numeric(p, rows, {}, (p.generators[b_index], 1))
    if res.kind == "inconsistent":
        return HclVerdict(True)
    return HclVerdict(False, res.assignment)
