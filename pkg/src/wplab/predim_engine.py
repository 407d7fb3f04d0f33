"""Finite symbolic models of field configurations and the predimension
calculus over them.

A Configuration holds named coordinates, a rational matroid whose column
rank plays the role of transcendence degree, and graph points (b, e) for
function slots (an exponential, or a wp-map with or without complex
multiplication).  Each slot carries a multiplier field k_i (Q, or Q(sqrt(d))
in the CM case) and a matrix of k_i-linear relations among its points.

On top of that sit td, the group ranks grk_i, the predimension
delta = td - sum grk_i, strongness, strong hulls, dimension as a minimum of
delta over extensions, greedy chain decomposition, the semimodularity
inequalities, and the independence certificate replaying the main
inequality chain d3 <= min(d1, d2), delta0(A/C) <= d1 + d2 - d3.

Subsets are bitmasks over the coordinate list; every rank query is memoized,
which keeps exhaustive subset scans (the semantics) fast enough for ground
sets up to the documented cap of 20 coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .errors import (
    BaseNotStrong,
    GroundSetTooLarge,
    IncompatibleConfiguration,
    InvalidConfiguration,
    NotStrong,
)
from .quadfield import QuadNum, is_squarefree

GROUND_SET_CAP = 20


@dataclass(frozen=True)
class FunctionSlot:
    """A coordinate-graph slot: exponential or a wp-map, with its multiplier
    field (Q, or Q(sqrt(d)) for the CM case)."""

    index: int
    kind: str  # "exp" | "wp_cm" | "wp_generic"
    d: Optional[int] = None  # CM discriminant kernel for "wp_cm"
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("exp", "wp_cm", "wp_generic"):
            raise InvalidConfiguration(f"unknown slot kind {self.kind!r}")
        if self.kind == "wp_cm":
            if self.d is None or self.d >= 0 or not is_squarefree(self.d):
                raise InvalidConfiguration(
                    "wp_cm slot needs a negative squarefree d"
                )
        elif self.d is not None:
            raise InvalidConfiguration(f"slot kind {self.kind} takes no d")

    @property
    def multiplier_field(self) -> str:
        return f"Q(sqrt({self.d}))" if self.kind == "wp_cm" else "Q"


@dataclass(frozen=True)
class GroupPoint:
    slot: int
    b: str
    e: str


@dataclass(frozen=True)
class PredimReport:
    td: int
    grk_per_slot: tuple
    delta: int

    @property
    def grk_total(self) -> int:
        return sum(self.grk_per_slot)


@dataclass(frozen=True)
class ChainStep:
    subset: frozenset
    tag: str  # "delta_zero" | "generic_singleton"
    delta: int


@dataclass(frozen=True)
class Chain:
    base: frozenset
    steps: tuple


# -- exact rank over Q and Q(sqrt(d)) ----------------------------------------

def _rank_fraction_matrix(rows) -> int:
    """Row rank by fraction-free Gaussian elimination; rows are lists of
    Fractions (mutated copies)."""
    rows = [list(r) for r in rows if any(x != 0 for x in r)]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < cols:
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                pivot = i
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = 1 / pr[col]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] * inv
            if f != 0:
                ri = rows[i]
                for j in range(col, cols):
                    ri[j] -= f * pr[j]
        rank += 1
        col += 1
    return rank


def _rank_quad_matrix(rows, d: int) -> int:
    """Row rank over Q(sqrt(d)); entries are (x, y) pairs meaning
    x + y*sqrt(d)."""
    def to_q(entry):
        if isinstance(entry, QuadNum):
            return entry
        x, y = entry
        return QuadNum(Fraction(x), Fraction(y), d)

    rows = [[to_q(e) for e in r] for r in rows]
    rows = [r for r in rows if any(not x.is_zero() for x in r)]
    if not rows:
        return 0
    cols = len(rows[0])
    rank = 0
    col = 0
    while rank < len(rows) and col < cols:
        pivot = None
        for i in range(rank, len(rows)):
            if not rows[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pr = rows[rank]
        inv = pr[col].inverse()
        for i in range(rank + 1, len(rows)):
            if not rows[i][col].is_zero():
                f = rows[i][col] * inv
                ri = rows[i]
                for j in range(col, cols):
                    ri[j] = ri[j] - f * pr[j]
        rank += 1
        col += 1
    return rank


# -- Configuration -----------------------------------------------------------

class Configuration:
    """Immutable finite model; all predimension queries live here.

    matroid columns are indexed like `coordinates`; relations[i] rows are
    k_i-linear dependencies among the slot-i points in their listed order."""

    def __init__(self, coordinates: Sequence[str], matroid_rows: Sequence[Sequence],
                 slots: Sequence[FunctionSlot], points: Sequence[GroupPoint],
                 relations=None, base: Sequence[str] = ()):
        self.coordinates = tuple(coordinates)
        if len(set(self.coordinates)) != len(self.coordinates):
            raise InvalidConfiguration("duplicate coordinate names")
        if len(self.coordinates) > GROUND_SET_CAP:
            raise GroundSetTooLarge(
                f"{len(self.coordinates)} coordinates exceed cap {GROUND_SET_CAP}"
            )
        self.index = {c: i for i, c in enumerate(self.coordinates)}
        self.matroid = tuple(
            tuple(Fraction(x) for x in row) for row in matroid_rows
        )
        for row in self.matroid:
            if len(row) != len(self.coordinates):
                raise InvalidConfiguration("matroid row width != #coordinates")
        self.slots = tuple(slots)
        if [s.index for s in self.slots] != list(range(len(self.slots))):
            raise InvalidConfiguration("slot indices must be 0..n-1 in order")
        self.points = tuple(points)
        self.points_by_slot = tuple(
            tuple(j for j, p in enumerate(self.points) if p.slot == s.index)
            for s in self.slots
        )
        self.relations = tuple(
            tuple(tuple(row) for row in (relations or {}).get(i, ()))
            for i in range(len(self.slots))
        )
        self.base = frozenset(base)
        self._td_cache = {}
        self._grk_cache = {}
        self._compat_cache = None
        self._validate_basic()

    # -- invariant checks ----------------------------------------------------

    def _validate_basic(self):
        for p in self.points:
            if p.slot < 0 or p.slot >= len(self.slots):
                raise InvalidConfiguration(f"point {p} names a missing slot")
            if p.b == p.e:
                raise InvalidConfiguration(f"point {p} has b == e")
            for c in (p.b, p.e):
                if c not in self.index:
                    raise InvalidConfiguration(f"point {p} names unknown {c!r}")
        for c in self.base:
            if c not in self.index:
                raise InvalidConfiguration(f"base names unknown {c!r}")
        for i, rel in enumerate(self.relations):
            npts = len(self.points_by_slot[i])
            for row in rel:
                if len(row) != npts:
                    raise InvalidConfiguration(
                        f"slot {i} relation row width != #points"
                    )
                if sum(1 for x in row if not self._entry_zero(i, x)) < 2:
                    raise InvalidConfiguration(
                        f"slot {i} relation row has < 2 nonzero entries"
                    )
            if rel and self._slot_rank(i, list(rel)) != len(rel):
                raise InvalidConfiguration(
                    f"slot {i} relation matrix is not of full row rank"
                )

    def _entry_zero(self, slot_i: int, entry) -> bool:
        if self.slots[slot_i].kind == "wp_cm":
            x, y = entry
            return Fraction(x) == 0 and Fraction(y) == 0
        return Fraction(entry) == 0

    def _slot_rank(self, slot_i: int, rows) -> int:
        if self.slots[slot_i].kind == "wp_cm":
            return _rank_quad_matrix(rows, self.slots[slot_i].d)
        return _rank_fraction_matrix(
            [[Fraction(x) for x in row] for row in rows]
        )

    # -- subsets as bitmasks --------------------------------------------------

    def mask(self, names) -> int:
        m = 0
        for c in names:
            m |= 1 << self.index[c]
        return m

    def names(self, mask: int) -> frozenset:
        return frozenset(
            c for i, c in enumerate(self.coordinates) if mask >> i & 1
        )

    @property
    def full_mask(self) -> int:
        return (1 << len(self.coordinates)) - 1

    # -- td -------------------------------------------------------------------

    def _matroid_rank(self, mask: int) -> int:
        hit = self._td_cache.get(mask)
        if hit is not None:
            return hit
        cols = [i for i in range(len(self.coordinates)) if mask >> i & 1]
        rows = [[row[i] for i in cols] for row in self.matroid]
        # rank of the column subset = rank of the transposed row system
        rank = _rank_fraction_matrix(
            [[rows[r][c] for r in range(len(rows))] for c in range(len(cols))]
        )
        self._td_cache[mask] = rank
        return rank

    def td_mask(self, b_mask: int, a_mask: int = 0) -> int:
        return self._matroid_rank(b_mask | a_mask) - self._matroid_rank(a_mask)

    # -- grk ------------------------------------------------------------------

    def _point_row(self, slot_i: int, pos: int):
        """Unit row for the pos-th slot point in that slot's coefficient ring."""
        npts = len(self.points_by_slot[slot_i])
        if self.slots[slot_i].kind == "wp_cm":
            zero, one = (Fraction(0), Fraction(0)), (Fraction(1), Fraction(0))
        else:
            zero, one = Fraction(0), Fraction(1)
        return [one if j == pos else zero for j in range(npts)]

    def _gamma_rank(self, slot_i: int, mask: int) -> int:
        """Rank of relations + the points with both coordinates in mask."""
        key = (slot_i, mask)
        hit = self._grk_cache.get(key)
        if hit is not None:
            return hit
        rows = list(self.relations[slot_i])
        for pos, j in enumerate(self.points_by_slot[slot_i]):
            p = self.points[j]
            if mask >> self.index[p.b] & 1 and mask >> self.index[p.e] & 1:
                rows.append(self._point_row(slot_i, pos))
        rank = self._slot_rank(slot_i, rows)
        self._grk_cache[key] = rank
        return rank

    def _gamma_join_rank(self, slot_i: int, mask_a: int, mask_b: int) -> int:
        """Rank of relations + points lying in A + points lying in B
        (the sum Gamma(A) + Gamma(B), not Gamma(A u B))."""
        included = 0
        for pos, j in enumerate(self.points_by_slot[slot_i]):
            p = self.points[j]
            bi, ei = self.index[p.b], self.index[p.e]
            in_a = mask_a >> bi & 1 and mask_a >> ei & 1
            in_b = mask_b >> bi & 1 and mask_b >> ei & 1
            if in_a or in_b:
                included |= 1 << pos
        key = (slot_i, "pts", included)
        hit = self._grk_cache.get(key)
        if hit is not None:
            return hit
        rows = list(self.relations[slot_i])
        for pos in range(len(self.points_by_slot[slot_i])):
            if included >> pos & 1:
                rows.append(self._point_row(slot_i, pos))
        rank = self._slot_rank(slot_i, rows)
        self._grk_cache[key] = rank
        return rank

    def grk_mask(self, slot_i: int, b_mask: int, a_mask: int = 0) -> int:
        """dim over k_i of (Gamma(B) + Gamma(A)) / Gamma(A) in the quotient
        by the relation rows: a rank difference with relations as base rows."""
        return (self._gamma_rank(slot_i, b_mask | a_mask)
                - self._gamma_rank(slot_i, a_mask))


# -- public operations --------------------------------------------------------

def _mask_of(cfg: Configuration, subset) -> int:
    if isinstance(subset, int):
        return subset
    return cfg.mask(subset)


def td(cfg: Configuration, b_subset, a_subset=()) -> int:
    return cfg.td_mask(_mask_of(cfg, b_subset), _mask_of(cfg, a_subset))


def grk(cfg: Configuration, slot_i: int, b_subset, a_subset=()) -> int:
    return cfg.grk_mask(slot_i, _mask_of(cfg, b_subset), _mask_of(cfg, a_subset))


def all_slots(cfg: Configuration) -> tuple:
    return tuple(range(len(cfg.slots)))


def delta(cfg: Configuration, slots_subset, b_subset, a_subset=()) -> PredimReport:
    b_mask = _mask_of(cfg, b_subset)
    a_mask = _mask_of(cfg, a_subset)
    t = cfg.td_mask(b_mask, a_mask)
    per = tuple(cfg.grk_mask(i, b_mask, a_mask) for i in slots_subset)
    return PredimReport(t, per, t - sum(per))


def _delta_int(cfg, slots_subset, b_mask, a_mask) -> int:
    t = cfg.td_mask(b_mask, a_mask)
    return t - sum(cfg.grk_mask(i, b_mask, a_mask) for i in slots_subset)


def _supersets_of(cfg, base_mask):
    """Masks S with base_mask <= S <= full, by popcount then value."""
    free = [i for i in range(len(cfg.coordinates))
            if not base_mask >> i & 1]
    for k in range(len(free) + 1):
        for combo in combinations(free, k):
            m = base_mask
            for i in combo:
                m |= 1 << i
            yield m


def validate(cfg: Configuration) -> dict:
    """Structured diagnostics: the constructor invariants (re-stated) plus
    intersection-compatibility of the relation data."""
    diagnostics = {"valid": True, "failures": []}
    try:
        compatible = is_intersection_compatible(cfg)
    except GroundSetTooLarge as e:
        diagnostics["failures"].append(f"compatibility check skipped: {e}")
        compatible = None
    if compatible is False:
        diagnostics["valid"] = False
        diagnostics["failures"].append(
            "intersection-compatibility fails: some A, B have "
            "Gamma(A) ^ Gamma(B) larger than Gamma(A ^ B)"
        )
    diagnostics["intersection_compatible"] = compatible
    return diagnostics


def is_intersection_compatible(cfg: Configuration) -> bool:
    """span(points in A) ^ span(points in B) = span(points in A^B) inside
    V_i / relations, for all subset pairs; via the rank identity
    rank(A) + rank(B) - rank(A u B) == rank(A ^ B) with relation rows as the
    common base (intersection can only be larger, never smaller)."""
    if not any(cfg.relations):
        return True
    if cfg._compat_cache is not None:
        return cfg._compat_cache
    n = len(cfg.coordinates)
    if n > 10:
        raise GroundSetTooLarge("exhaustive pair check beyond 10 coordinates")
    full = cfg.full_mask
    for i in range(len(cfg.slots)):
        if not cfg.relations[i]:
            continue
        for a in range(full + 1):
            ra = cfg._gamma_rank(i, a)
            for b in range(a, full + 1):
                rb = cfg._gamma_rank(i, b)
                rab = cfg._gamma_join_rank(i, a, b)
                rint = cfg._gamma_rank(i, a & b)
                if ra + rb - rab != rint:
                    cfg._compat_cache = False
                    return False
    cfg._compat_cache = True
    return True


def is_strong(cfg: Configuration, a_subset, slots_subset=None):
    """(True, None) iff delta(S/A) >= 0 for every S containing A; otherwise
    (False, minimal violating subset) with minimality by cardinality then
    lexicographic coordinate order."""
    if slots_subset is None:
        slots_subset = all_slots(cfg)
    a_mask = _mask_of(cfg, a_subset)
    for s_mask in _supersets_of(cfg, a_mask):
        if s_mask == a_mask:
            continue
        if _delta_int(cfg, slots_subset, s_mask, a_mask) < 0:
            return False, cfg.names(s_mask)
    return True, None


def strong_hull(cfg: Configuration, a_subset, slots_subset=None) -> frozenset:
    """Smallest strong superset, by iteratively absorbing a minimal
    delta-violating witness."""
    if slots_subset is None:
        slots_subset = all_slots(cfg)
    a_mask = _mask_of(cfg, a_subset)
    while True:
        ok, witness = is_strong(cfg, a_mask, slots_subset)
        if ok:
            return cfg.names(a_mask)
        a_mask |= cfg.mask(witness)


def predim_dim(cfg: Configuration, a_subset, c_subset=(), slots_subset=None,
               with_witness: bool = False):
    """dim(A/C) = min over S >= A of delta(S u C / C); C must be strong."""
    if slots_subset is None:
        slots_subset = all_slots(cfg)
    c_mask = _mask_of(cfg, c_subset)
    ok, _ = is_strong(cfg, c_mask, slots_subset)
    if not ok:
        raise BaseNotStrong("the base subset is not strong")
    a_mask = _mask_of(cfg, a_subset) | c_mask
    best = None
    best_mask = None
    for s_mask in _supersets_of(cfg, a_mask):
        d = _delta_int(cfg, slots_subset, s_mask, c_mask)
        if best is None or d < best:
            best, best_mask = d, s_mask
    if with_witness:
        return best, cfg.names(best_mask)
    return best


def chain_decompose(cfg: Configuration, a_subset, b_subset,
                    slots_subset=None) -> Chain:
    """Greedy chain from A to B: absorb a smallest delta = 0 extension while
    one exists, otherwise adjoin the lexicographically first coordinate as a
    generic singleton (td = delta = 1 step).  A must be strong in B."""
    if slots_subset is None:
        slots_subset = all_slots(cfg)
    a_mask = _mask_of(cfg, a_subset)
    b_mask = _mask_of(cfg, b_subset) | a_mask
    # strong within B: delta(S/A) >= 0 for A <= S <= B
    for s_mask in _supersets_of(cfg, a_mask):
        if s_mask | b_mask == b_mask and \
                _delta_int(cfg, slots_subset, s_mask, a_mask) < 0:
            raise NotStrong("the chain base is not strong in the target")
    steps = []
    cur = a_mask
    while cur != b_mask:
        found = None
        free = [i for i in range(len(cfg.coordinates))
                if b_mask >> i & 1 and not cur >> i & 1]
        for k in range(1, len(free) + 1):
            for combo in combinations(free, k):
                ext = cur
                for i in combo:
                    ext |= 1 << i
                if _delta_int(cfg, slots_subset, ext, cur) == 0:
                    found = ext
                    break
            if found is not None:
                break
        if found is not None:
            steps.append(ChainStep(cfg.names(found), "delta_zero", 0))
            cur = found
            continue
        ext = cur | (1 << free[0])
        d = _delta_int(cfg, slots_subset, ext, cur)
        t = cfg.td_mask(ext, cur)
        if not (d == 1 and t == 1):
            raise NotStrong(
                "no delta = 0 extension and the singleton step is not "
                f"generic (td = {t}, delta = {d})"
            )
        steps.append(ChainStep(cfg.names(ext), "generic_singleton", 1))
        cur = ext
    return Chain(cfg.names(a_mask), tuple(steps))


@dataclass(frozen=True)
class SemimodularityReport:
    grk_upper_semimodular: bool
    td_lower_semimodular: bool
    delta_submodular: bool
    grk_monotone: bool

    @property
    def all_hold(self) -> bool:
        return (self.grk_upper_semimodular and self.td_lower_semimodular
                and self.delta_submodular and self.grk_monotone)


def check_semimodularity(cfg: Configuration, a_subset, b_subset, c_subset=(),
                         slots_subset=None) -> SemimodularityReport:
    """The four lemma inequalities on the triple (A, B, C), C inside both."""
    if slots_subset is None:
        slots_subset = all_slots(cfg)
    c_mask = _mask_of(cfg, c_subset)
    a_mask = _mask_of(cfg, a_subset) | c_mask
    b_mask = _mask_of(cfg, b_subset) | c_mask
    if any(cfg.relations) and not is_intersection_compatible(cfg):
        raise IncompatibleConfiguration(
            "the configuration's relation data violates "
            "intersection-compatibility; the lemma does not apply to it"
        )
    ab = a_mask | b_mask
    cap = a_mask & b_mask

    def g(mask):
        return sum(cfg.grk_mask(i, mask, c_mask) for i in slots_subset)

    grk_ok = g(ab) + g(cap) >= g(a_mask) + g(b_mask)
    td_ok = (cfg.td_mask(ab, c_mask) + cfg.td_mask(cap, c_mask)
             <= cfg.td_mask(a_mask, c_mask) + cfg.td_mask(b_mask, c_mask))
    dl_ok = (_delta_int(cfg, slots_subset, ab, c_mask)
             + _delta_int(cfg, slots_subset, cap, c_mask)
             <= _delta_int(cfg, slots_subset, a_mask, c_mask)
             + _delta_int(cfg, slots_subset, b_mask, c_mask))
    mono_ok = True
    for i in slots_subset:
        if cfg.grk_mask(i, cap, c_mask) > cfg.grk_mask(i, ab, c_mask):
            mono_ok = False
    partial = sum(cfg.grk_mask(i, ab, c_mask) for i in slots_subset[:1])
    if partial > g(ab):
        mono_ok = False
    return SemimodularityReport(grk_ok, td_ok, dl_ok, mono_ok)


@dataclass(frozen=True)
class IndependenceCertificate:
    d0: int
    d1: int
    d2: int
    d3: int
    b1_witness: frozenset
    b2_witness: frozenset
    a_intersection: frozenset
    delta0_a: int
    semimodular_bound_holds: bool  # delta0(A/C) <= d1 + d2 - d3
    d3_bound_holds: bool           # d3 <= min(d1, d2)
    hypotheses_hold: bool          # fa closed under F1 and F2 over C u a
    conclusion_holds: Optional[bool]
    note: str = ""

    @property
    def certified(self) -> bool:
        return (self.hypotheses_hold and self.semimodular_bound_holds
                and self.d3_bound_holds and bool(self.conclusion_holds))


def independence_certificate(cfg: Configuration, slots_f1, slots_f2,
                             a_subset, fa_subset, c_subset=()) -> IndependenceCertificate:
    """Replay of the main inequality chain.  With F0 = F1 ^ F2 and
    F3 = F1 u F2, compute d_i = dim_{F_i}(a u fa / C), take minimizing
    witnesses B1, B2 and A = B1 ^ B2, and verify delta0(A/C) <= d1 + d2 - d3
    and d3 <= min(d1, d2).  The hypotheses are that fa adds no F1- or
    F2-dimension over C u a; when they certify, the conclusion is that fa
    adds no F0-dimension either."""
    f1 = tuple(slots_f1)
    f2 = tuple(slots_f2)
    f0 = tuple(i for i in f1 if i in f2)
    f3 = tuple(sorted(set(f1) | set(f2)))
    c_mask = _mask_of(cfg, c_subset)
    a_mask = _mask_of(cfg, a_subset) | c_mask
    fa_mask = _mask_of(cfg, fa_subset)
    target = a_mask | fa_mask

    d0 = predim_dim(cfg, target, c_mask, f0)
    d1, b1 = predim_dim(cfg, target, c_mask, f1, with_witness=True)
    d2, b2 = predim_dim(cfg, target, c_mask, f2, with_witness=True)
    d3 = predim_dim(cfg, target, c_mask, f3)

    # hypotheses: dim_{F_i}(fa / C u a) = 0, computed as a dim difference
    h1 = predim_dim(cfg, target, c_mask, f1) - predim_dim(cfg, a_mask, c_mask, f1)
    h2 = predim_dim(cfg, target, c_mask, f2) - predim_dim(cfg, a_mask, c_mask, f2)
    hypotheses = h1 == 0 and h2 == 0

    b1_mask = cfg.mask(b1)
    b2_mask = cfg.mask(b2)
    a_int = b1_mask & b2_mask
    delta0_a = _delta_int(cfg, f0, a_int, c_mask)
    semi_ok = delta0_a <= d1 + d2 - d3
    d3_ok = d3 <= min(d1, d2)

    conclusion = None
    note = ""
    if hypotheses:
        conclusion = (predim_dim(cfg, target, c_mask, f0)
                      - predim_dim(cfg, a_mask, c_mask, f0)) == 0
    else:
        note = ("certificate withheld: the local-closure hypotheses fail "
                f"(dim_F1(fa/Ca) = {h1}, dim_F2(fa/Ca) = {h2})")
    return IndependenceCertificate(
        d0, d1, d2, d3, b1, b2, cfg.names(a_int), delta0_a,
        semi_ok, d3_ok, hypotheses, conclusion, note,
    )
