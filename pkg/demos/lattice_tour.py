"""A short tour of exact lattice arithmetic: reduction, complex
multiplication detection, and isogeny testing with validated witnesses."""

from fractions import Fraction

from wplab.lattice_core import (
    cm_field,
    flt,
    is_isogenous,
    make_lattice,
    reduce_tau,
)
from wplab.quadfield import QuadNum

F = Fraction

# Reduce a period ratio to the canonical fundamental-domain representative.
tau = QuadNum(F(7, 2), F(3, 2), -1)  # 7/2 + (3/2)i
reduced, matrix = reduce_tau(tau)
print(f"tau = {tau}")
print(f"reduced tau = {reduced}  via  {matrix}")
assert flt(matrix, tau) == reduced

# Complex multiplication: a lattice with tau in an imaginary quadratic
# field has extra endomorphisms; cm_field reports the field's d.
lat = make_lattice(QuadNum(1, 0, -3), QuadNum(F(1, 2), F(3, 2), -3))
print(f"\ncm_field: d = {cm_field(lat)}")

# Isogeny: two lattices are isogenous iff some alpha maps one into the
# other with finite index.  Same CM field => isogenous, with a witness.
l1 = make_lattice(QuadNum(1, 0, -1), QuadNum(0, 1, -1))       # tau = i
l2 = make_lattice(QuadNum(1, 0, -1), QuadNum(0, 3, -1))       # tau = 3i
v = is_isogenous(l1, l2)
print(f"\ntau=i vs tau=3i: {v.outcome}, witness alpha = {v.alpha}")

# Different CM fields can never be isogenous.
l3 = make_lattice(QuadNum(1, 0, -2), QuadNum(0, 1, -2))
v2 = is_isogenous(l1, l3)
print(f"tau=i vs tau=i*sqrt(2): {v2.outcome} ({v2.reason})")
