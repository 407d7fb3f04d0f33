"""Command-line surface.

Subcommands: lattice {normalize|reduce|cm|isogenous|isr},
wp {invariants|eval|verify}, predim {report|strong|hull|dim|chain|lemma7|
certificate}, deriv {rank|extend|hcl}, count, selftest.

Exit codes: 0 success, 1 for valid negative mathematical answers
(not isogenous, not strong, point excluded), 2 for failures to decide or
operate (precision, parsing, search bounds).  Identical invocations produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from mpmath import iv, mp

from . import serialize
from .cintervals import ComplexBox, ri, working_precision
from .counting import (
    Domain,
    ExpWpLog,
    Identity,
    RationalQ,
    classify_point,
    count_report,
    default_eps,
    enumerate_rationals,
)
from .differentials import der_dimension, extend_derivation, hcl_witness
from .errors import WplabError
from .lattice_core import (
    IsogenyVerdict,
    Lattice,
    cm_field,
    conjugate,
    is_isogenous,
    isr_equivalent,
    make_lattice,
    reduce_tau,
)
from .predim_engine import (
    chain_decompose,
    check_semimodularity,
    delta,
    independence_certificate,
    is_strong,
    predim_dim,
    strong_hull,
)
from .quadfield import QuadNum
from .wp_numerics import (
    addition_residual,
    homogeneity_residual,
    invariants,
    isogeny_residual,
    ode_residual,
    schwarz_residual,
    wp,
    wp_prime,
)


class CliError(WplabError):
    pass


QUAD_RE = re.compile(
    r"^\s*(?P<p>[+-]?\d+(?:/\d+)?)?\s*(?P<q>[+-](?:\d+(?:/\d+)?)?)i\s*:\s*(?P<d>-\d+)\s*$"
)
COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:\.\d+)?(?:/\d+)?)?\s*(?P<im>[+-]?(?:\d+(?:\.\d+)?(?:/\d+)?)?)i?\s*$"
)


def parse_value(text: str, precision: int):
    """Parse 'p+qi:d' (exact quadratic), 'a+bi' (numeric box), 'i', or a
    plain real number."""
    s = text.strip()
    if s in ("i", "+i", "1i"):
        return QuadNum(Fraction(0), Fraction(1), -1)
    m = QUAD_RE.match(s)
    if m:
        p = Fraction(m.group("p")) if m.group("p") else Fraction(0)
        qs = m.group("q")
        if qs in ("+", "-"):
            qs += "1"
        return QuadNum(p, Fraction(qs), int(m.group("d")))
    with working_precision(precision):
        if "i" in s:
            body = s[: s.rindex("i")]
            mm = re.match(
                r"^\s*(?P<re>[+-]?\d+(?:\.\d+)?)?\s*(?P<im>[+-]?\d*(?:\.\d+)?)\s*$",
                body,
            )
            if not mm:
                raise CliError(f"cannot parse complex value {text!r}")
            re_part = mm.group("re") or "0"
            im_part = mm.group("im") or "1"
            if im_part in ("+", "-"):
                im_part += "1"
            return ComplexBox(iv.mpf(re_part), iv.mpf(im_part))
        try:
            return ComplexBox(ri(Fraction(s)))
        except ValueError:
            try:
                return ComplexBox(iv.mpf(s))
            except Exception as exc:
                raise CliError(f"cannot parse value {text!r}") from exc


def lattice_from_tau(tau, precision: int) -> Lattice:
    if isinstance(tau, QuadNum):
        return make_lattice(QuadNum.rational(1, tau.d), tau)
    with working_precision(precision):
        return make_lattice(ComplexBox(1), tau)


def parse_subset(text):
    if text is None or text.strip() == "":
        return ()
    return tuple(x.strip() for x in text.split(",") if x.strip())


def parse_slots(text, cfg):
    if text is None or text.strip() == "":
        return tuple(range(len(cfg.slots)))
    return tuple(int(x) for x in text.split(","))


def box_str(z: ComplexBox, precision: int) -> str:
    rec = serialize.box_record(z, precision)
    return f"{rec['re']} + {rec['im']}i (err {rec['err']})"


def value_str(z, precision: int) -> str:
    if isinstance(z, QuadNum):
        return f"{serialize.frac_str(z.p)} + {serialize.frac_str(z.q)}*sqrt({z.d})"
    return box_str(z, precision)


def emit(args, text_lines, record):
    if args.format == "record":
        print(serialize.dumps(record))
    else:
        for line in text_lines:
            print(line)


def _verdict_exit(v: IsogenyVerdict) -> int:
    if v.outcome == "isogenous":
        return 0
    if v.outcome == "not_isogenous":
        return 1
    return 2


def _verdict_record(v: IsogenyVerdict, precision):
    rec = {"outcome": v.outcome}
    if v.witness is not None:
        rec["witness"] = [list(r) for r in v.witness]
    if v.alpha is not None:
        rec["alpha"] = (
            serialize.quad_record(v.alpha)
            if isinstance(v.alpha, QuadNum)
            else serialize.box_record(v.alpha, precision)
        )
    if v.reason:
        rec["reason"] = v.reason
    if v.bound is not None:
        rec["bound"] = v.bound
    if v.used_reflection is not None:
        rec["used_reflection"] = v.used_reflection
    return rec


# -- lattice -----------------------------------------------------------------

def cmd_lattice(args) -> int:
    prec = args.precision
    if args.action == "normalize":
        w1 = parse_value(args.w1, prec)
        w2 = parse_value(args.w2, prec)
        with working_precision(prec):
            lat = make_lattice(w1, w2)
            rec = serialize.lattice_record(lat, prec)
        emit(args, [
            f"tau = {value_str(lat.tau, prec)}",
            f"basis_change = {lat.basis_change}",
        ], rec)
        return 0
    if args.action == "reduce":
        tau = parse_value(args.tau, prec)
        with working_precision(prec):
            red, mat = reduce_tau(tau)
        rec = {
            "tau_reduced": serialize.quad_record(red)
            if isinstance(red, QuadNum) else serialize.box_record(red, prec),
            "unimodular": [list(r) for r in mat],
        }
        emit(args, [
            f"tau_reduced = {value_str(red, prec)}",
            f"unimodular = {mat}",
        ], rec)
        return 0
    if args.action == "cm":
        tau = parse_value(args.tau, prec)
        lat = lattice_from_tau(tau, prec)
        with working_precision(prec):
            d = cm_field(lat, args.bound)
        rec = {"cm_d": d}
        emit(args, [f"cm_d = {d}"], rec)
        return 0 if d is not None else 1
    tau1 = parse_value(args.tau1, prec)
    tau2 = parse_value(args.tau2, prec)
    l1 = lattice_from_tau(tau1, prec)
    l2 = lattice_from_tau(tau2, prec)
    with working_precision(prec):
        if args.action == "isogenous":
            v = is_isogenous(l1, l2, args.bound)
        else:
            v = isr_equivalent(l1, l2, args.bound)
    rec = _verdict_record(v, prec)
    lines = [f"outcome = {v.outcome}"]
    if v.witness is not None:
        lines.append(f"witness = {v.witness}")
    if v.used_reflection is not None:
        lines.append(f"used_reflection = {v.used_reflection}")
    if v.reason:
        lines.append(f"reason = {v.reason}")
    emit(args, lines, rec)
    return _verdict_exit(v)


# -- wp ----------------------------------------------------------------------

def _random_cell_points(lat: Lattice, count: int, seed: int, precision: int):
    import random

    rng = random.Random(seed)
    with working_precision(precision):
        tau = complex(lat.tau_box().mid())
        w1 = complex(lat.omega1_box().mid())
    out = []
    for _ in range(count):
        x = rng.uniform(0.12, 0.44)
        y = rng.uniform(0.12, 0.44)
        out.append((x + y * tau) * w1)
    return out


def cmd_wp(args) -> int:
    prec = args.precision
    tau = parse_value(args.tau, prec)
    lat = lattice_from_tau(tau, prec)
    model = invariants(lat, prec)
    if args.action == "invariants":
        rec = {
            "g2": serialize.box_record(model.g2, prec),
            "g3": serialize.box_record(model.g3, prec),
            "precision": prec,
        }
        emit(args, [
            f"g2 = {box_str(model.g2, prec)}",
            f"g3 = {box_str(model.g3, prec)}",
        ], rec)
        return 0
    if args.action == "eval":
        z = parse_value(args.z, prec)
        with working_precision(prec):
            p_val = wp(model, z)
            pp_val = wp_prime(model, z)
        rec = {
            "wp": serialize.box_record(p_val, prec),
            "wp_prime": serialize.box_record(pp_val, prec),
        }
        emit(args, [
            f"wp(z) = {box_str(p_val, prec)}",
            f"wp'(z) = {box_str(pp_val, prec)}",
        ], rec)
        return 0
    # verify
    zs = _random_cell_points(lat, args.samples, args.seed, prec)
    worst = mp.mpf(0)
    tag = args.identity
    with working_precision(prec):
        for z in zs:
            if tag == "ode":
                r = ode_residual(model, z)
            elif tag == "homogeneity":
                r = homogeneity_residual(model, Fraction(3, 2), z)
            elif tag == "schwarz":
                r = schwarz_residual(model, z)
            elif tag == "addition":
                r = addition_residual(model, z, 0.7 * z + 0.11)
            else:  # isogeny
                tau2 = parse_value(args.tau2, prec) if args.tau2 else None
                l2 = (lattice_from_tau(tau2, prec) if tau2 is not None
                      else make_lattice(lat.omega1_box(),
                                        lat.omega2_box() * 2))
                v = is_isogenous(lat, l2, args.bound)
                if not v.is_isogenous:
                    raise CliError("lattices not certified isogenous")
                r = isogeny_residual(lat, l2, v.alpha, z, prec)
            worst = max(worst, r.value)
    bound_str = mp.nstr(worst, 8)
    rec = {
        "identity": tag,
        "samples": args.samples,
        "precision": prec,
        "max_residual": bound_str,
    }
    emit(args, [f"max residual over {args.samples} samples = {bound_str}"], rec)
    return 0


# -- predim ------------------------------------------------------------------

def _load_config(path):
    with open(path, encoding="utf-8") as fh:
        return serialize.parse_configuration(serialize.loads(fh.read()))


def cmd_predim(args) -> int:
    cfg = _load_config(args.config)
    subset = parse_subset(getattr(args, "set", None))
    base = parse_subset(getattr(args, "base", None))
    slots = parse_slots(getattr(args, "slots", None), cfg)
    if args.action == "report":
        rep = delta(cfg, slots, subset, base)
        rec = {
            "td": rep.td,
            "grk_per_slot": list(rep.grk_per_slot),
            "grk_total": rep.grk_total,
            "delta": rep.delta,
        }
        emit(args, [
            f"td = {rep.td}",
            f"grk = {list(rep.grk_per_slot)} (total {rep.grk_total})",
            f"delta = {rep.delta}",
        ], rec)
        return 0
    if args.action == "strong":
        ok, witness = is_strong(cfg, subset, slots)
        rec = {"strong": ok}
        lines = [f"strong = {ok}"]
        if witness is not None:
            rec["violating_subset"] = sorted(witness)
            lines.append(f"violating_subset = {sorted(witness)}")
        emit(args, lines, rec)
        return 0 if ok else 1
    if args.action == "hull":
        hull = strong_hull(cfg, subset, slots)
        rec = {"hull": sorted(hull)}
        emit(args, [f"hull = {sorted(hull)}"], rec)
        return 0
    if args.action == "dim":
        dim, witness = predim_dim(cfg, subset, base, slots, with_witness=True)
        rec = {"dim": dim, "witness": sorted(witness)}
        emit(args, [f"dim = {dim}", f"witness = {sorted(witness)}"], rec)
        return 0
    if args.action == "chain":
        target = parse_subset(args.target) or cfg.coordinates
        chain = chain_decompose(cfg, subset, target, slots)
        rec = {
            "base": sorted(chain.base),
            "steps": [
                {"subset": sorted(s.subset), "tag": s.tag, "delta": s.delta}
                for s in chain.steps
            ],
        }
        lines = [f"base = {sorted(chain.base)}"] + [
            f"step {i + 1}: {s.tag} -> {sorted(s.subset)} (delta {s.delta})"
            for i, s in enumerate(chain.steps)
        ]
        emit(args, lines, rec)
        return 0
    if args.action == "lemma7":
        b = parse_subset(args.b)
        rep = check_semimodularity(cfg, subset, b, base, slots)
        rec = {
            "grk_upper_semimodular": rep.grk_upper_semimodular,
            "td_lower_semimodular": rep.td_lower_semimodular,
            "delta_submodular": rep.delta_submodular,
            "grk_monotone": rep.grk_monotone,
        }
        emit(args, [f"{k} = {v}" for k, v in rec.items()], rec)
        return 0 if rep.all_hold else 1
    # certificate
    f1 = tuple(int(x) for x in args.f1.split(","))
    f2 = tuple(int(x) for x in args.f2.split(","))
    fa = parse_subset(args.fa)
    cert = independence_certificate(cfg, f1, f2, subset, fa, base)
    rec = {
        "d0": cert.d0, "d1": cert.d1, "d2": cert.d2, "d3": cert.d3,
        "delta0_A": cert.delta0_a,
        "A": sorted(cert.a_intersection),
        "semimodular_bound_holds": cert.semimodular_bound_holds,
        "d3_bound_holds": cert.d3_bound_holds,
        "hypotheses_hold": cert.hypotheses_hold,
        "conclusion_holds": cert.conclusion_holds,
        "certified": cert.certified,
    }
    if cert.note:
        rec["note"] = cert.note
    lines = [
        f"d0={cert.d0} d1={cert.d1} d2={cert.d2} d3={cert.d3}",
        f"delta0(A/C) = {cert.delta0_a} over A = {sorted(cert.a_intersection)}",
        f"delta0(A/C) <= d1+d2-d3: {cert.semimodular_bound_holds}",
        f"d3 <= min(d1,d2): {cert.d3_bound_holds}",
        f"hypotheses hold: {cert.hypotheses_hold}",
        f"conclusion holds: {cert.conclusion_holds}",
        f"certified: {cert.certified}",
    ]
    if cert.note:
        lines.append(cert.note)
    emit(args, lines, rec)
    return 0 if cert.certified else 1


# -- deriv -------------------------------------------------------------------

def _load_presentation(path):
    with open(path, encoding="utf-8") as fh:
        return serialize.parse_presentation(serialize.loads(fh.read()))


def _parse_assignments(text):
    out = {}
    if not text:
        return out
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not _:
            raise CliError(f"expected name=value, got {part!r}")
        out[name.strip()] = value.strip()
    return out


def cmd_deriv(args) -> int:
    p, forms = _load_presentation(args.presentation)
    if args.action == "rank":
        dim = der_dimension(p, forms)
        rec = {"der_dimension": dim, "generators": len(p.generators)}
        emit(args, [f"der_dimension = {dim}"], rec)
        return 0
    if args.action == "extend":
        boundary = _parse_assignments(args.boundary)
        target = None
        if args.target:
            t = _parse_assignments(args.target)
            if len(t) != 1:
                raise CliError("target must be a single name=value")
            target = next(iter(t.items()))
        res = extend_derivation(p, forms, boundary, target)
        rec = {"kind": res.kind}
        lines = [f"kind = {res.kind}"]
        if res.kind == "family":
            rec["dimension"] = res.dimension
            lines.append(f"dimension = {res.dimension}")
        if res.assignment is not None:
            shown = {k: str(v) for k, v in res.assignment.items()}
            rec["assignment"] = shown
            lines.append(f"assignment = {shown}")
        if res.certificate_row is not None:
            rec["certificate_row"] = [str(x) for x in res.certificate_row]
            lines.append(f"certificate_row = {rec['certificate_row']}")
        emit(args, lines, rec)
        return 0 if res.kind != "inconsistent" else 1
    # hcl
    b_index = p.generators.index(args.b) if args.b in p.generators \
        else int(args.b)
    verdict = hcl_witness(p, forms, b_index)
    rec = {"in_closure": verdict.in_closure}
    lines = [f"in_closure = {verdict.in_closure}"]
    if verdict.witness is not None:
        shown = {k: str(v) for k, v in verdict.witness.items()}
        rec["witness"] = shown
        lines.append(f"witness = {shown}")
    emit(args, lines, rec)
    return 0


# -- count -------------------------------------------------------------------

def cmd_count(args) -> int:
    prec = args.precision
    lo, _, hi = args.domain.partition(":")
    domain = Domain(
        Fraction(lo) if lo else None,
        Fraction(hi) if hi else None,
    )
    if args.h == "identity":
        target = Identity(domain)
    else:
        tau = parse_value(args.tau, prec)
        lat = lattice_from_tau(tau, prec)
        target = ExpWpLog(lat, domain)
    schedule = [int(x) for x in args.heights.split(",")]
    eps = Fraction(args.eps) if args.eps else default_eps(prec)
    rep = count_report(target, schedule, eps, prec)
    rec = {
        "h": args.h,
        "heights": list(rep.h_schedule),
        "counts": list(rep.counts),
        "undetermined": list(rep.undetermined),
        "eps": serialize.frac_str(rep.eps),
        "precision": prec,
    }
    lines = ["H\tN(H)\tundetermined"]
    for H, n, u in zip(rep.h_schedule, rep.counts, rep.undetermined):
        lines.append(f"{H}\t{n}\t{u}")
    if rep.fit is not None:
        c, k, ssr = rep.fit
        rec["fit"] = {"c": f"{c:.6g}", "k": f"{k:.6g}", "ssr": f"{ssr:.6g}"}
        lines.append(f"fit: N ~ {c:.6g} * (log H)^{k:.6g} (ssr {ssr:.3g})")
    else:
        lines.append("fit: not reported (need >= 3 nonzero data points)")
    emit(args, lines, rec)
    return 0


# -- selftest ----------------------------------------------------------------

def cmd_selftest(args) -> int:
    from . import acceptance

    selected = None
    if args.criteria:
        selected = [int(x) for x in args.criteria.split(",")]
    results = acceptance.run_all(selected, seed=args.seed)
    all_ok = True
    for num, ok, detail in results:
        status = "PASS" if ok else "FAIL"
        print(f"criterion {num:2d}: {status} - {detail}")
        all_ok = all_ok and ok
    return 0 if all_ok else 1


# -- entry point -------------------------------------------------------------

def _common(sp):
    sp.add_argument("--precision", type=int, default=128)
    sp.add_argument("--bound", type=int, default=10)
    sp.add_argument("--seed", type=int, default=20260824)
    sp.add_argument("--format", choices=("text", "record"), default="text")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wplab",
        description="lattice, wp-function, predimension, derivation and "
                    "point-counting workbench",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice")
    lat_sub = lat.add_subparsers(dest="action", required=True)
    p = lat_sub.add_parser("normalize")
    p.add_argument("--w1", required=True)
    p.add_argument("--w2", required=True)
    _common(p)
    p = lat_sub.add_parser("reduce")
    p.add_argument("--tau", required=True)
    _common(p)
    p = lat_sub.add_parser("cm")
    p.add_argument("--tau", required=True)
    _common(p)
    for name in ("isogenous", "isr"):
        p = lat_sub.add_parser(name)
        p.add_argument("--tau1", required=True)
        p.add_argument("--tau2", required=True)
        _common(p)

    wp_p = sub.add_parser("wp")
    wp_sub = wp_p.add_subparsers(dest="action", required=True)
    p = wp_sub.add_parser("invariants")
    p.add_argument("--tau", required=True)
    _common(p)
    p = wp_sub.add_parser("eval")
    p.add_argument("--tau", required=True)
    p.add_argument("--z", required=True)
    _common(p)
    p = wp_sub.add_parser("verify")
    p.add_argument("--tau", required=True)
    p.add_argument("--tau2")
    p.add_argument(
        "--identity", required=True,
        choices=("ode", "homogeneity", "schwarz", "addition", "isogeny"),
    )
    p.add_argument("--samples", type=int, default=100)
    _common(p)

    pd = sub.add_parser("predim")
    pd_sub = pd.add_subparsers(dest="action", required=True)
    for name in ("report", "strong", "hull", "dim", "chain", "lemma7",
                 "certificate"):
        p = pd_sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--set", default="")
        p.add_argument("--base", default="")
        p.add_argument("--slots", default="")
        if name == "chain":
            p.add_argument("--target", default="")
        if name == "lemma7":
            p.add_argument("--b", default="")
        if name == "certificate":
            p.add_argument("--f1", required=True)
            p.add_argument("--f2", required=True)
            p.add_argument("--fa", required=True)
        _common(p)

    dv = sub.add_parser("deriv")
    dv_sub = dv.add_subparsers(dest="action", required=True)
    for name in ("rank", "extend", "hcl"):
        p = dv_sub.add_parser(name)
        p.add_argument("--presentation", required=True)
        if name == "extend":
            p.add_argument("--boundary", default="")
            p.add_argument("--target", default="")
        if name == "hcl":
            p.add_argument("--b", required=True)
        _common(p)

    p = sub.add_parser("count")
    p.add_argument("--h", choices=("identity", "expwplog"), default="identity")
    p.add_argument("--tau", default="2i:-1")
    p.add_argument("--domain", default="0:")
    p.add_argument("--heights", default="2,10")
    p.add_argument("--eps", default="")
    _common(p)

    p = sub.add_parser("selftest")
    p.add_argument("--criteria", default="")
    _common(p)
    return ap


def run(argv) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "lattice":
            return cmd_lattice(args)
        if args.command == "wp":
            return cmd_wp(args)
        if args.command == "predim":
            return cmd_predim(args)
        if args.command == "deriv":
            return cmd_deriv(args)
        if args.command == "count":
            return cmd_count(args)
        return cmd_selftest(args)
    except WplabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
