"""Command-line front end.  Every command prints one JSON report.

Exit codes: 0 success, 2 a mathematical verdict of false / not found,
1 any error (bad input, unsupported field, parse failure, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time

from . import acceptance
from . import chainp
from . import fpgroup as fp
from . import quadform as qf
from . import residues as rs
from . import symbolic as sy
from . import wittring as wr
from .errors import IsometryFails, MilnorWittError, NotFoundWithinSupport, ParseError
from .parsing import parse_element, parse_field, parse_form, parse_place, parse_symbol

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALSE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Outcome:
    """Result payload, verdict and provenance of one command."""

    def __init__(self, result, verdict=True, **provenance):
        self.result = result
        self.verdict = verdict
        self.provenance = provenance


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _form(text):
    obj = parse_form(text)
    if isinstance(obj, qf.PfisterForm):
        return obj.expand()
    if isinstance(obj, qf.GramMatrix):
        return qf.diagonalize(obj)
    return obj


def _vec(v):
    return None if v is None else [str(x) for x in v]


def _need(args, name):
    val = getattr(args, name.replace("-", "_"))
    if val is None:
        raise UsageError(f"--{name} is required")
    return val


def _eta_max(args):
    return 2 if args.eta_max is None else args.eta_max


def _is_symbol(text):
    body = text.rpartition("@")[0]
    return any(tok in body for tok in ("{", "[", "l(", "eta")) and not body.lstrip().startswith(("diag", "gram", "pfister", "[["))


def _element(text, theory=None):
    if _is_symbol(text):
        return parse_symbol(text, theory)
    return _form(text)


def _places(text, field):
    return [parse_place(f"{p.strip()}@{field.tag}") for p in text.split(";" if "poly" in text else ",") if p.strip()]


def _tuple(text):
    pf = parse_form(text)
    if not isinstance(pf, qf.PfisterForm):
        raise UsageError("expected a Pfister tuple such as pfister(2,3)@QQ")
    return chainp.PfisterTuple(pf.field, pf.slots)


def _support(args, field):
    if args.support is None:
        return None
    return [parse_element(s, field) for s in args.support.split(",") if s.strip()]


def _serialize(x):
    if isinstance(x, wr.WittClass):
        return x.to_json()
    if isinstance(x, sy.SymbolExpr):
        return x.tag()
    if isinstance(x, qf.QuadForm):
        return x.tag()
    return x


# ---------------------------------------------------------------------------
# qf, pfister
# ---------------------------------------------------------------------------

def cmd_qf(args):
    if args.verb == "diag":
        q = _form(args.form)
        return Outcome({"form": q.tag(), "rank": q.rank})
    if args.verb == "isometric":
        if args.other is None:
            raise UsageError("qf isometric needs two forms")
        q1, q2 = _form(args.form), _form(args.other)
        flag = qf.is_isometric(q1, q2)
        return Outcome(flag, flag)
    if args.verb == "isotropic":
        q = _form(args.form)
        flag, w = qf.is_isotropic(q, witness=True)
        return Outcome({"isotropic": flag, "witness": _vec(w)}, flag)
    if args.verb == "witt":
        q = _form(args.form)
        w = wr.witt_class(q)
        out = {"class": w.to_json(), "rank_parity": q.rank % 2}
        if q.field.is_finite:
            out["anisotropic_rank"] = w.anisotropic_rank()
        return Outcome(out)
    if args.verb == "represents":
        if args.other is None:
            raise UsageError("qf represents needs a form and a value")
        q = _form(args.form)
        c = parse_element(args.other.rpartition("@")[0] if "@" in args.other else args.other, q.field)
        flag, w = qf.represents(q, c, witness=True)
        return Outcome({"represents": flag, "value": str(c), "witness": _vec(w)}, flag)
    raise UsageError(f"unknown qf verb {args.verb}")


def cmd_pfister(args):
    pf = parse_form(args.form)
    if not isinstance(pf, qf.PfisterForm):
        raise UsageError("expected pfister(...)@FIELD")
    if args.verb == "expand":
        q = pf.expand()
    else:
        q = pf.pure_subform()
    return Outcome({"pfister": pf.tag(), "form": q.tag(), "rank": q.rank})


# ---------------------------------------------------------------------------
# chain
# ---------------------------------------------------------------------------

def _load_certificate(text):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad certificate JSON: {exc.msg}", text, exc.pos) from None
    if isinstance(data, dict):
        data = data.get("certificate", data.get("result", {}).get("certificate", []))
    return data


def cmd_chain(args):
    t1, t2 = _tuple(args.first), _tuple(args.second)
    if args.verb == "find":
        sup = _support(args, t1.field)
        try:
            cert = chainp.find_chain(t1, t2, sup)
        except IsometryFails as exc:
            return Outcome({"found": False, "reason": "isometry", "message": str(exc)}, False)
        except NotFoundWithinSupport as exc:
            return Outcome({"found": False, "reason": "support", "message": str(exc)}, False)
        return Outcome({"found": True, "steps": len(cert), "certificate": cert.to_json()},
                       support=args.support)
    if args.cert is None:
        raise UsageError("chain verify needs a certificate (JSON text or @FILE)")
    cert = chainp.ChainCertificate.from_json(t1.field, _load_certificate(args.cert))
    v = chainp.verify_chain(t1, t2, cert)
    out = v.to_json()
    if not v.ok:
        out["failed_step"] = v.failed_step + 1  # report 1-based like the certificate
    return Outcome(out, v.ok)


# ---------------------------------------------------------------------------
# kgroup
# ---------------------------------------------------------------------------

def cmd_kgroup(args):
    F = parse_field(_need(args, "field"))
    n = _need(args, "degree")
    em = _eta_max(args)
    if args.verb == "compute":
        theory = args.theory or "MWK"
        if theory not in sy.THEORIES:
            raise UsageError(f"unknown theory {theory}")
        P = sy.present_group(theory, F, n, em)
        out = P.describe()
        prov = {"eta_max": em, "generator_cap": sy.generator_cap()}
        if theory != "KM":
            nxt = sy.present_group(theory, F, n, em + 1).invariant_factors()
            prov["stabilization"] = {"eta_max": em + 1, "free": nxt[0], "torsion": nxt[1],
                                     "stable": list(nxt) == [out["free"], out["torsion"]]}
        return Outcome({"theory": theory, "field": F.tag, "degree": n, **out}, **prov)
    if args.verb == "verify-pullback":
        rep = sy.verify_pullback(F, n, em)
    elif args.verb == "verify-exact":
        rep = sy.verify_exact_sequence(F, n, em)
    elif args.verb == "verify-theta":
        rep = sy.verify_theta(F, n, em)
    elif args.verb == "verify-presentation":
        rep = sy.presentation_check_I_n(F, n)
        return Outcome(rep, rep["ok"], oracle_checks=["enumerate_witt_group"])
    else:
        raise UsageError(f"unknown kgroup verb {args.verb}")
    return Outcome(rep, rep["ok"], eta_max=em, generator_cap=sy.generator_cap())


# ---------------------------------------------------------------------------
# residue
# ---------------------------------------------------------------------------

def cmd_residue(args):
    e = _element(args.element, args.theory)
    F = e.field
    if args.verb == "at":
        if args.place is None:
            raise UsageError("residue at needs a place")
        v = parse_place(args.place if "@" in args.place else f"{args.place}@{F.tag}")
        if v.kind == "two" and isinstance(e, qf.QuadForm):
            return Outcome({"place": str(v), "parity_surrogate": rs.residue_parity_two(e)},
                           note="surrogate Z/2 invariant at 2, not a residue map")
        pi = parse_element(args.uniformizer, F) if args.uniformizer else v.default_uniformizer()
        r = rs.residue(e, v, pi)
        return Outcome({"place": str(v), "uniformizer": str(pi), "residue": _serialize(r),
                        "residue_field": v.residue_field().tag})
    places = _places(args.places, F) if args.places else None
    rep = rs.unramified_check(e, places)
    return Outcome(rep.to_json(), rep.verdict != "ramified")


# ---------------------------------------------------------------------------
# snf, selftest
# ---------------------------------------------------------------------------

def cmd_snf(args):
    try:
        A = json.loads(args.matrix)
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad matrix JSON: {exc.msg}", args.matrix, exc.pos) from None
    if not (isinstance(A, list) and A and all(isinstance(r, list) for r in A)
            and len({len(r) for r in A}) == 1 and all(isinstance(x, int) for r in A for x in r)):
        raise UsageError("matrix must be a nonempty rectangular list of integer rows")
    U, D, V = fp.smith_normal_form(A)
    d = fp.diagonal(D)
    free = len(A[0]) - sum(1 for x in d if x)
    G = fp.FPAbGroup(len(A[0]), [dict(enumerate(r)) for r in A])
    f2, tors = G.invariant_factors()
    return Outcome({"U": U, "D": D, "V": V, "diagonal": d,
                    "cokernel": {"free": f2, "torsion": tors}}, verified=free == f2)


def cmd_selftest(args):
    seed = acceptance.DEFAULT_SEED if args.seed is None else args.seed
    results = acceptance.run_all(args.profile, seed)
    payload = [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results]
    ok = all(r.ok for r in results)
    out = Outcome({"profile": args.profile, "passed": sum(r.ok for r in results),
                   "total": len(results), "criteria": payload}, ok, seed=seed)
    out.timing = {f"criterion_{r.number}": round(r.seconds, 3) for r in results}
    return out


HANDLERS = {"qf": cmd_qf, "pfister": cmd_pfister, "chain": cmd_chain, "kgroup": cmd_kgroup,
            "residue": cmd_residue, "snf": cmd_snf, "selftest": cmd_selftest}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")
    common.add_argument("--output", help="write the report to FILE instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--eta-max", type=int)
    common.add_argument("--support", help="comma-separated square-class generators")
    common.add_argument("--theory", choices=["KM", "WK", "MWK"])
    common.add_argument("--field")
    common.add_argument("--degree", type=int)
    common.add_argument("--places", help="comma-separated places, e.g. 3,7 or poly(t);inf")
    common.add_argument("--uniformizer")

    p = _Parser(prog="milnorwitt", description="Quadratic forms, Witt rings and K-groups of exact fields.")
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    q = sub.add_parser("qf", parents=[common])
    q.add_argument("verb", choices=["diag", "isometric", "isotropic", "witt", "represents"])
    q.add_argument("form")
    q.add_argument("other", nargs="?")

    pf = sub.add_parser("pfister", parents=[common])
    pf.add_argument("verb", choices=["expand", "pure"])
    pf.add_argument("form")

    c = sub.add_parser("chain", parents=[common])
    c.add_argument("verb", choices=["find", "verify"])
    c.add_argument("first")
    c.add_argument("second")
    c.add_argument("cert", nargs="?")

    k = sub.add_parser("kgroup", parents=[common])
    k.add_argument("verb", choices=["compute", "verify-pullback", "verify-exact",
                                    "verify-presentation", "verify-theta"])

    r = sub.add_parser("residue", parents=[common])
    r.add_argument("verb", choices=["at", "unramified"])
    r.add_argument("element")
    r.add_argument("place", nargs="?")

    s = sub.add_parser("snf", parents=[common])
    s.add_argument("matrix", help="JSON list of integer rows")

    st = sub.add_parser("selftest", parents=[common])
    st.add_argument("profile", choices=["quick", "full"], nargs="?", default="quick")
    return p


_VALUE_OPTS = ("--support", "--uniformizer", "--places", "--field")


def _glue_values(argv):
    """``--support -1,2`` -> ``--support=-1,2`` so negative values are not read as options."""
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _command_echo(args):
    out = {k: v for k, v in sorted(vars(args).items()) if v is not None and k not in ("pretty", "output")}
    return out


def _emit(report, args_pretty, output):
    text = json.dumps(report, sort_keys=True, indent=2 if args_pretty else None) + "\n"
    if output:
        d = os.path.dirname(os.path.abspath(output))
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".milnorwitt-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, output)
    else:
        sys.stdout.write(text)


def _error_payload(exc):
    err = {"type": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        err.update(position=exc.position, expected=exc.expected, text=exc.text)
    return err


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": {"argv": argv}}
    pretty, output = "--pretty" in argv, None
    try:
        args = build_parser().parse_args(_glue_values(argv))
        pretty, output = args.pretty, args.output
        report["command"] = _command_echo(args)
        out = HANDLERS[args.group](args)
        report["result"] = out.result
        report["verdict"] = bool(out.verdict)
        report["provenance"] = out.provenance
        code = EXIT_OK if out.verdict else EXIT_FALSE
        timing = getattr(out, "timing", {})
    except (UsageError, MilnorWittError, OSError, KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        report["error"] = _error_payload(exc)
        report["provenance"] = {}
        code = EXIT_ERROR
        timing = {}
    report["exit_code"] = code
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3), **timing}
    try:
        _emit(report, pretty, output)
    except OSError as exc:
        report["error"] = _error_payload(exc)
        report["exit_code"] = EXIT_ERROR
        _emit(report, pretty, None)
        return EXIT_ERROR
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
