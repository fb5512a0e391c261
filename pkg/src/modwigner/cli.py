"""Command-line front end.

Exit codes: 0 success/pass, 1 hypothesis failure or failed check,
2 malformed input or bad arguments, 3 shape mismatch, 4 oracle miss,
5 d = 1 where d >= 2 is required.

Reports on standard output are ``key=value`` lines ending in
``status=pass`` or ``status=fail``.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialization as ser
from .algebra import DEFAULT_TOL, absolute
from .errors import DimensionOne, HypothesisFailed, OracleMiss, ShapeMismatch, SizeLimit
from .hmodule import canonical_basis, inner, modular_gram_schmidt, norms
from .opalgebra import ModuleOperator
from .sampling import random_element, random_unitary
from .selftest import run_selftest
from .wigner import (
    GAUGE_NOTE,
    SyntheticOracle,
    TableOracle,
    all_pairs,
    check_preservation,
    decompose,
    obstruction,
    random_pairs,
    synthesize,
)

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED, EXIT_SHAPE, EXIT_MISS, EXIT_DIM1 = 0, 1, 2, 3, 4, 5


def _emit(**kv):
    for k, v in kv.items():
        print(f"{k}={v}")


def _fmt(z) -> str:
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _matrix_lines(name, m):
    for i, row in enumerate(np.atleast_2d(m)):
        print(f"{name}[{i}]=" + ",".join(_fmt(z) for z in row))


def load_oracle(doc: ser.Document):
    """Table oracle from ``domain``/``image`` lists, or synthetic from ``U`` and ``seed``."""
    if "U" in doc:
        U = ModuleOperator(doc.get("U", "operator"))
        seed = doc.get("seed", "int") if "seed" in doc else 0
        phase = doc.get("phase", "scalar") if "phase" in doc else None
        return synthesize(U, seed, doc.d, constant_phase=phase)
    if "domain" in doc and "image" in doc:
        dom, img = doc.get("domain", "module_list"), doc.get("image", "module_list")
        if len(dom) != len(img):
            raise ser.MalformedDocument("domain and image lengths differ")
        return TableOracle(doc.d, doc.n, zip(dom, img))
    raise ser.MalformedDocument("map document needs 'U' (synthetic) or 'domain' and 'image' (table)")


def oracle_document(T) -> ser.Document:
    doc = ser.Document(T.d, T.n)
    if isinstance(T, SyntheticOracle):
        doc.put("U", "operator", T.U.matrix)
        doc.put("seed", "int", T.phase_seed)
        if T.constant_phase is not None:
            doc.put("phase", "scalar", T.constant_phase)
    else:
        dom = T.domain
        doc.put("domain", "module_list", dom)
        doc.put("image", "module_list", [T(f) for f in dom])
    return doc


def cmd_gram(args):
    doc = ser.read(args.input)
    gens = doc.get("generators", "module_list")
    basis = modular_gram_schmidt(gens, args.tol, d=doc.d, n=doc.n)
    out = ser.Document(doc.d, doc.n)
    out.put("basis", "module_list", list(basis))
    out.put("length", "int", len(basis))
    ser.write(out, args.output)
    _emit(generators=len(gens), basis_length=len(basis), status="pass")
    return EXIT_OK


def cmd_inner(args):
    doc = ser.read(args.input)
    f, g = doc.get("f", "module"), doc.get("g", "module")
    ip = inner(f, g)
    _matrix_lines("inner", ip)
    _matrix_lines("abs", absolute(ip))
    op, tr = norms(f)
    _emit(f_op_norm=f"{op:.12g}", f_trace_norm=f"{tr:.12g}")
    if args.output:
        out = ser.Document(doc.d, doc.n)
        out.put("inner", "algebra", ip)
        out.put("abs", "algebra", absolute(ip))
        ser.write(out, args.output)
    _emit(status="pass")
    return EXIT_OK


def cmd_check(args):
    T = load_oracle(ser.read(args.map))
    if args.samples:
        sdoc = ser.read(args.samples)
        if (sdoc.d, sdoc.n) != (T.d, T.n):
            raise ShapeMismatch(f"samples have shape ({sdoc.d}, {sdoc.n}), map has ({T.d}, {T.n})")
        if "left" in sdoc and "right" in sdoc:
            # explicit pairs (left[k], right[k])
            left, right = sdoc.get("left", "module_list"), sdoc.get("right", "module_list")
            if len(left) != len(right):
                raise ser.MalformedDocument("left and right lengths differ")
            pairs = list(zip(left, right))
            index = [(k, k) for k in range(len(pairs))]
        else:
            samples = sdoc.get("samples", "module_list")
            index = [(i, j) for i in range(len(samples)) for j in range(i, len(samples))]
            pairs = all_pairs(samples)
    elif isinstance(T, TableOracle):
        samples = T.domain
        index = [(i, j) for i in range(len(samples)) for j in range(i, len(samples))]
        pairs = all_pairs(samples)
    else:
        pairs = random_pairs(T.d, T.n, args.trials, args.seed)
        index = [(2 * k, 2 * k + 1) for k in range(len(pairs))]
    rep = check_preservation(T, pairs, args.tol)
    worst = "none" if rep.worst_pair is None else "%d,%d" % index[rep.worst_pair]
    _emit(oracle=T.kind, pairs=rep.count, max_deviation=f"{rep.max_deviation:.12g}", worst_pair=worst,
          tol=args.tol, status="pass" if rep.passed else "fail")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_decompose(args):
    T = load_oracle(ser.read(args.map))
    try:
        dec = decompose(T, tol=args.tol, probes=args.probes, seed=args.seed)
    except HypothesisFailed as exc:
        _emit(error="HypothesisFailed", message=str(exc).replace("\n", " "), witness=exc.witness,
              deviation=exc.deviation, status="fail")
        return EXIT_FAIL
    out = ser.Document(T.d, T.n)
    out.put("U", "operator", dec.U.matrix)
    out.put("probes", "module_list", list(dec.probes))
    out.put("phases", "scalar_list", list(dec.phase_values))
    out.put("max_residual", "real", dec.max_residual)
    out.put("gauge", "text", dec.gauge_note)
    out.put("full", "int", int(dec.full))
    ser.write(out, args.output)
    _matrix_lines("U", dec.U.matrix)
    _emit(basis_size=len(dec.basis), probes=len(dec.probes), max_residual=f"{dec.max_residual:.6e}",
          gauge=GAUGE_NOTE.replace(" ", "_"), full=int(dec.full), status="pass")
    return EXIT_OK


def cmd_synthesize(args):
    rng = np.random.default_rng(args.seed)
    U = random_unitary(args.n, rng)
    T = synthesize(U, args.phase_seed, args.d)
    if args.table is not None:
        canon = list(canonical_basis(args.d, args.n))
        dom = canon + [canon[0] + f for f in canon[1:]]
        dom += [random_element(args.d, args.n, rng) for _ in range(args.table)]
        T = TableOracle(args.d, args.n, [(ser.canonical_array(f), T(ser.canonical_array(f))) for f in dom])
    ser.write(oracle_document(T), args.output)
    _emit(oracle=T.kind, d=args.d, n=args.n, status="pass")
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest(args.d, args.n, args.trials, args.seed, args.tol)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    _emit(groups=len(results), status="pass" if ok else "fail")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_obstruction(args):
    try:
        a, pa, pb, dist = obstruction(args.d)
    except DimensionOne as exc:
        _emit(d=args.d, message=str(exc).replace(" ", "_"), status="fail")
        return EXIT_DIM1
    _matrix_lines("witness", a)
    _matrix_lines("abs_a", pa)
    _matrix_lines("abs_a_star", pb)
    _emit(distance=f"{dist:.12g}", status="pass")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modwigner", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL)

    sp = sub.add_parser("gram", help="modular Gram-Schmidt of a generator list")
    sp.add_argument("input")
    sp.add_argument("-o", "--output", required=True)
    common(sp)
    sp.set_defaults(func=cmd_gram)

    sp = sub.add_parser("inner", help="generalized inner product of entries f and g")
    sp.add_argument("input")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_inner)

    sp = sub.add_parser("check", help="verify |[Tf,Tf']| = |[f,f']| on samples",
                        description="Samples come from a document holding 'samples' (all pairs i <= j) or "
                                    "'left' and 'right' (explicit pairs); without one, a table's own domain "
                                    "or --trials random pairs are used.")
    sp.add_argument("map")
    sp.add_argument("samples", nargs="?")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("decompose", help="recover U and phases with Tf = phase(f) U f")
    sp.add_argument("map")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--probes", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("synthesize", help="write a synthetic map descriptor (or a table with --table)")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0, help="seed for the random unitary")
    sp.add_argument("--phase-seed", type=int, default=1)
    sp.add_argument("--table", type=int, metavar="K", help="tabulate canonical probes plus K random elements")
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("selftest", help="seeded randomized verification of all identities")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("obstruction", help="print the |a| != |a*| witness")
    sp.add_argument("--d", type=int, required=True)
    sp.set_defaults(func=cmd_obstruction)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_MALFORMED if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ser.MalformedDocument as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(error="MalformedDocument", status="fail")
        return EXIT_MALFORMED
    except SizeLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(error="SizeLimit", status="fail")
        return EXIT_MALFORMED
    except ShapeMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(error="ShapeMismatch", status="fail")
        return EXIT_SHAPE
    except OracleMiss as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(error="OracleMiss", status="fail")
        return EXIT_MISS
    except DimensionOne as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(error="DimensionOne", status="fail")
        return EXIT_DIM1


if __name__ == "__main__":
    sys.exit(main())
