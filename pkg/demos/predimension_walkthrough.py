"""Predimension bookkeeping on finite configurations: delta = td - grk,
strong subsets and hulls, the dimension over a strong base, and an
independence certificate for two function slots sharing a base field."""

from fractions import Fraction

from wplab.predim_engine import (
    Configuration,
    FunctionSlot,
    GroupPoint,
    chain_decompose,
    delta,
    independence_certificate,
    predim_dim,
    strong_hull,
)

F = Fraction


def free_matroid(n):
    return [[F(1 if i == j else 0) for j in range(n)] for i in range(n)]


# One exponential graph point over two free coordinates:
# td = 2 transcendence degrees, grk = 1 group-rank condition, delta = 1.
cfg = Configuration(
    ("b", "e"), free_matroid(2),
    [FunctionSlot(0, "exp")], [GroupPoint(0, "b", "e")],
)
rep = delta(cfg, (0,), ("b", "e"))
print(f"td = {rep.td}, grk = {rep.grk_total}, delta = {rep.delta}")

# Dimension of {b} over the empty (strong) base, with a witnessing set.
dim, witness = predim_dim(cfg, ("b",), with_witness=True)
print(f"dim(b) = {dim}, witness = {sorted(witness)}")

# The chain decomposition tells the same story one step at a time:
# a generic singleton contributes 1, closing the graph point contributes 0.
chain = chain_decompose(cfg, (), ("b", "e"))
for step in chain.steps:
    print(f"  step {sorted(step.subset)}: {step.tag}, delta = {step.delta}")

# A non-strong base: two unrelated graph points over a single
# transcendence degree force delta({b, e}) = 1 - 2 = -1, and the hull
# records exactly which coordinates must be adjoined.
dep = Configuration(
    ("b", "e", "x"),
    [[F(1), F(1), F(0)], [F(0), F(0), F(1)]],
    [FunctionSlot(0, "exp")],
    [GroupPoint(0, "b", "e"), GroupPoint(0, "b", "e")],
)
hull = strong_hull(dep, ())
print(f"\nstrong hull of the empty set: {sorted(hull)}")

# Independence of two function slots over a common base: the four rank
# inequalities hold, so the certificate is issued.
cert_cfg = Configuration(
    ("a1", "e1", "a2", "w2", "fa"),
    [
        [F(1), 0, 0, 0, F(1)],
        [0, F(1), 0, 0, 0],
        [0, 0, F(1), 0, 0],
        [0, 0, 0, F(1), 0],
    ],
    [FunctionSlot(0, "exp"), FunctionSlot(1, "wp_generic")],
    [GroupPoint(0, "a1", "e1"), GroupPoint(1, "a2", "w2")],
)
cert = independence_certificate(
    cert_cfg, (0,), (1,), ("a1", "e1", "a2", "w2"), ("fa",)
)
print(f"\nd0..d3 = ({cert.d0}, {cert.d1}, {cert.d2}, {cert.d3})")
print(f"certified independent: {cert.certified}")
