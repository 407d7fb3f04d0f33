"""Counting certified rational solutions by height: the identity map as a
calibration target, then a composite transcendental map whose certified
count stays at zero while the machinery proves every candidate away."""

from fractions import Fraction

from wplab.counting import Domain, ExpWpLog, Identity, count_report, fit_log_counts
from wplab.lattice_core import make_lattice
from wplab.quadfield import QuadNum

F = Fraction

# Identity on (0, inf): every rational of height <= H is a solution, so the
# counts are a known arithmetic quantity and make a good calibration run.
ident = Identity(Domain(F(0), None))
heights = (2, 5, 10, 25)
rep = count_report(ident, heights)
for h, n in zip(heights, rep.counts):
    print(f"N({h:3d}) = {n}")
c, k, ssr = fit_log_counts(heights[1:], rep.counts[1:])
print(f"fit: N(H) ~ {c:.2f} * (log H)^{k:.2f}  (ssr {ssr:.3f})")

# A transcendental composite on a rectangular lattice: exp then wp then
# log of the height-bounded rationals in a pole-free window.  Every
# candidate pair is either confirmed within eps or excluded by a certified
# enclosure; none is left undetermined.
rect = make_lattice(QuadNum(1, 0, -1), QuadNum(0, 2, -1))
h = ExpWpLog(rect, Domain(F(11, 10), F(5, 2)))
rep2 = count_report(h, (3, 6), precision=128)
print(f"\ncomposite counts at heights (3, 6): {rep2.counts}")
print(f"undetermined: {rep2.undetermined}")
