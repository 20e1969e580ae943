"""Command line front end.

    qrep gen voiculescu --n 32 -o pair.json
    qrep invariant kappa --word "[a,b]" -i pair.json
    qrep verify exel-loring --n 64
    qrep stability --g 1 --n 32 --radius 0.19 --seeds 20 --csv runs.csv

Every command emits one JSON report (stdout or -o) embedding the resolved
configuration and tolerances; sweep commands additionally write a CSV with
the fixed column set

    n, g, seed, radius, kappa, wn, k, relator_defect, mult_defect,
    e_defect, gap, status

one row per case, errors appearing in the status column rather than
truncating the sweep.  Exit codes: 0 success; 1 violated precondition or
hypothesis; 2 numerical failure (branch cut, missing spectral gap,
singular path); 3 I/O, format, or usage errors.

Tolerance defaults may be overridden by QREP_TOL_<NAME> environment
variables and per-invocation --tol-<name> flags (flags win).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import json
import os
import sys

import numpy as np

from . import config
from .bott import SurfacePullback, k_invariant, verify_index_formula
from .errors import FormatError, InputError, QrepError
from .examples import (
    PerturbationSpec,
    direct_sum,
    perturb,
    perturbed_copy,
    pullback,
    voiculescu_pair,
    voiculescu_qrep,
)
from .invariants import (
    exel_homotopy_gap,
    kappa,
    kazhdan_stability,
    winding_number_det_segment,
)
from .matcore import Unitary, matrix_from_json
from .words import (
    CommutatorDatum,
    FreeWord,
    Presentation,
    QuasiRep,
    Z2NormalForm,
    evaluate,
    mult_defect,
    parse_word,
    qrep_from_json,
    qrep_to_json,
    relator_defect,
)

CSV_COLUMNS = ["n", "g", "seed", "radius", "kappa", "wn", "k",
               "relator_defect", "mult_defect", "e_defect", "gap", "status"]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is taken by numerical
    # failures here, so usage problems are remapped to the I/O/syntax code.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trace", choices=["standard", "normalized"],
                        default="standard", help="trace mode for kappa")
    common.add_argument("--seed", type=int, default=0, help="base RNG seed")
    common.add_argument("-o", "--out", metavar="PATH",
                        help="write the JSON report here instead of stdout")
    common.add_argument("--csv", metavar="PATH",
                        help="write sweep rows as CSV (sweep commands only)")
    common.add_argument("--deterministic", action="store_true",
                        help="omit the timestamp so identical runs are byte-identical")
    for f in dataclasses.fields(config.Tolerances):
        kind = int if f.type == "int" else float
        common.add_argument(f"--tol-{f.name.replace('_', '-')}",
                            dest=f"tol_{f.name}", type=kind, default=None,
                            metavar="X", help=f"override {f.name} (default {f.default})")
    return common


def build_parser() -> _Parser:
    parser = _Parser(prog="qrep",
                     description="invariants of almost-commuting unitaries")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate quasi-representations")
    gen_sub = gen.add_subparsers(dest="family", required=True)

    p = gen_sub.add_parser("voiculescu", parents=[common],
                           help="shift/phase pair over the two-generator abelian group")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_gen_voiculescu)

    p = gen_sub.add_parser("perturbed", parents=[common],
                           help="random perturbation of a quasi-representation")
    p.add_argument("--n", type=int, help="dimension of the built-in base pair")
    p.add_argument("-i", "--input", metavar="QREP", help="base quasi-representation")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--targets", help="comma list of generators (default: all)")
    p.set_defaults(func=cmd_gen_perturbed)

    p = gen_sub.add_parser("pullback", parents=[common],
                           help="surface-group pullback of a two-generator base")
    p.add_argument("--n", type=int, help="dimension of the built-in base pair")
    p.add_argument("-i", "--input", metavar="QREP", help="base quasi-representation")
    p.add_argument("--images", required=True,
                   help='substitution like "s1=a,t1=b,s2=,t2=" (empty = identity word)')
    p.set_defaults(func=cmd_gen_pullback)

    p = gen_sub.add_parser("direct-sum", parents=[common],
                           help="block-diagonal sum of two quasi-representations")
    p.add_argument("-i", "--input", action="append", required=True, metavar="QREP",
                   help="give twice: the two summands")
    p.set_defaults(func=cmd_gen_direct_sum)

    p = sub.add_parser("invariant", parents=[common],
                       help="compute kappa, the winding number, or the k class")
    p.add_argument("which", choices=["kappa", "winding", "k"])
    p.add_argument("-i", "--input", required=True, metavar="FILE",
                   help="matrix JSON or quasi-representation JSON")
    p.add_argument("--word", help="word to evaluate (quasi-representation inputs)")
    p.set_defaults(func=cmd_invariant)

    p = sub.add_parser("defect", parents=[common],
                       help="relator and multiplicativity defects")
    p.add_argument("-i", "--input", required=True, metavar="QREP")
    p.add_argument("--set", dest="element_set",
                   help="comma list of words (default: generators and inverses)")
    p.set_defaults(func=cmd_defect)

    verify = sub.add_parser("verify", help="index-identity verifications")
    verify_sub = verify.add_subparsers(dest="check", required=True)

    p = verify_sub.add_parser("exel-loring", parents=[common],
                              help="k class vs winding number vs kappa")
    p.add_argument("--n", type=int, help="single dimension")
    p.add_argument("--n-range", metavar="A:B:STEP",
                   help="sweep dimensions A..B inclusive in steps")
    p.add_argument("-i", "--input", metavar="QREP",
                   help="verify this quasi-representation instead of the built-in pair")
    p.set_defaults(func=cmd_verify_exel_loring)

    p = verify_sub.add_parser("remark25", parents=[common],
                              help="invariance across commutator representatives of one class")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify_remark25)

    p = sub.add_parser("stability", parents=[common],
                       help="perturbation stability sweep for commutator products")
    p.add_argument("--g", type=int, default=1, help="number of commutator pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--seeds", type=int, default=1, help="number of seeded runs")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("homotopy-gap", parents=[common],
                       help="max deviation between the linear segment and exp(t log w)")
    p.add_argument("-i", "--input", required=True, metavar="MATRIX")
    p.set_defaults(func=cmd_homotopy_gap)

    return parser


# -- plumbing -----------------------------------------------------------------

def _resolve_tolerances(args) -> config.Tolerances:
    tol = config.from_env(config.DEFAULTS)
    overrides = {}
    for f in dataclasses.fields(config.Tolerances):
        value = getattr(args, f"tol_{f.name}", None)
        if value is not None:
            overrides[f.name] = value
    return dataclasses.replace(tol, **overrides) if overrides else tol


def _load_json(path: str):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc}") from None
    # reports written by this tool wrap the payload in an envelope; accept
    # those transparently so gen output feeds straight back into -i
    if isinstance(obj, dict) and "result" in obj and "command" in obj:
        inner = obj["result"]
        if isinstance(inner, dict) and ("presentation" in inner or "dim" in inner):
            return inner
    return obj


def _load_qrep(path: str):
    obj = _load_json(path)
    if not isinstance(obj, dict) or "presentation" not in obj:
        raise FormatError("expected a quasi-representation object", path=path)
    return qrep_from_json(obj, base_dir=os.path.dirname(os.path.abspath(path)))


def _load_matrix_or_qrep(path: str):
    obj = _load_json(path)
    if isinstance(obj, dict) and "dim" in obj:
        return "matrix", Unitary.of(matrix_from_json(obj))
    if isinstance(obj, dict) and "presentation" in obj:
        return "qrep", qrep_from_json(obj, base_dir=os.path.dirname(os.path.abspath(path)))
    raise FormatError("input is neither a matrix nor a quasi-representation",
                      path=path)


def _split_top_level(text: str) -> list[str]:
    # Commas nested inside [] or () belong to words, not the list.
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if np.isfinite(v) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _emit(args, tol: config.Tolerances, command: str, result) -> None:
    cfg = {k: v for k, v in sorted(vars(args).items())
           if k != "func" and not k.startswith("tol_") and v is not None}
    report = {
        "command": command,
        "config": _jsonable(cfg),
        "tolerances": tol.as_dict(),
        "result": _jsonable(result),
    }
    if not args.deterministic:
        report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k))
                             for k in CSV_COLUMNS})


def _base_qrep(args, tol):
    if getattr(args, "input", None):
        return _load_qrep(args.input)
    if getattr(args, "n", None):
        return voiculescu_qrep(args.n)
    raise InputError("give either -i or --n")


# -- command handlers ----------------------------------------------------------

def cmd_gen_voiculescu(args, tol):
    _emit(args, tol, "gen voiculescu", qrep_to_json(voiculescu_qrep(args.n)))


def cmd_gen_perturbed(args, tol):
    base = _base_qrep(args, tol)
    targets = None
    if args.targets:
        targets = tuple(s for s in _split_top_level(args.targets) if s)
    spec = PerturbationSpec(radius=args.radius, seed=args.seed, targets=targets)
    _emit(args, tol, "gen perturbed", qrep_to_json(perturb(base, spec)))


def cmd_gen_pullback(args, tol):
    base = _base_qrep(args, tol)
    images = {}
    for part in _split_top_level(args.images):
        if not part:
            continue
        if "=" not in part:
            raise InputError("each image must look like s1=word", part=part)
        name, _, word = part.partition("=")
        images[name.strip()] = parse_word(word)
    _emit(args, tol, "gen pullback", qrep_to_json(pullback(base, images)))


def cmd_gen_direct_sum(args, tol):
    if len(args.input) != 2:
        raise InputError("direct-sum needs exactly two -i inputs",
                         given=len(args.input))
    qr = direct_sum(_load_qrep(args.input[0]), _load_qrep(args.input[1]))
    _emit(args, tol, "gen direct-sum", qrep_to_json(qr))


def _input_unitary(args) -> Unitary:
    kind, payload = _load_matrix_or_qrep(args.input)
    if kind == "matrix":
        if args.word:
            raise InputError("--word applies to quasi-representation inputs only")
        return payload
    if not args.word:
        raise InputError("quasi-representation inputs need --word")
    return evaluate(parse_word(args.word), payload.images)


def cmd_invariant(args, tol):
    if args.which == "kappa":
        w = _input_unitary(args)
        report = kappa(w, args.trace, margin=tol.branch_margin,
                       cluster_width=tol.cluster_width,
                       integer_tol=tol.integer_residual, det_tol=tol.det_one)
        _emit(args, tol, "invariant kappa", report.to_json())
    elif args.which == "winding":
        w = _input_unitary(args)
        report = winding_number_det_segment(
            w, samples=tol.winding_samples, max_depth=tol.winding_max_depth,
            loop_tol=tol.loop_closure, floor=tol.path_floor,
            integer_tol=tol.integer_residual)
        _emit(args, tol, "invariant winding", report.to_json())
    else:
        kind, payload = _load_matrix_or_qrep(args.input)
        if kind != "qrep" or len(payload.presentation.generators) != 2:
            raise InputError("the k class needs a two-generator quasi-representation")
        if args.word:
            raise InputError("the k class is computed from the generator pair, not a word")
        g0, g1 = payload.presentation.generators
        report = k_invariant(payload.images[g0], payload.images[g1],
                             threshold=tol.projection_threshold,
                             gap=tol.projection_gap, defect_max=tol.defect_max,
                             integer_tol=tol.integer_residual)
        _emit(args, tol, "invariant k", report.to_json())


def cmd_defect(args, tol):
    qr = _load_qrep(args.input)
    if args.element_set:
        elements = [parse_word(w) for w in _split_top_level(args.element_set)]
    else:
        gens = [parse_word(g) for g in qr.presentation.generators]
        elements = gens + [g.inverse() for g in gens]
    md = mult_defect(qr, elements)
    result = {
        "relator_defect": relator_defect(qr),
        "mult_defect": {"epsilon": md.epsilon,
                        "inverse_defect": md.inverse_defect,
                        "set_size": md.set_size},
    }
    _emit(args, tol, "defect", result)


def _sweep_row_exel(n: int, tol) -> dict:
    row = {"n": n, "g": 1, "seed": "", "radius": "", "status": "ok"}
    try:
        qr = voiculescu_qrep(n)
        report = verify_index_formula(qr, tolerances=tol)
        gens = [parse_word(g) for g in qr.presentation.generators]
        md = mult_defect(qr, gens + [g.inverse() for g in gens])
        row.update({
            "kappa": report.rhs_kappa.rounded,
            "wn": report.rhs_wn.rounded,
            "k": report.lhs_k,
            "relator_defect": report.defects["relator_defect"],
            "mult_defect": md.epsilon,
            "e_defect": report.defects["e_defect"],
            "gap": report.defects["spectral_gap"],
        })
        if not report.equal:
            row["status"] = "mismatch"
    except QrepError as exc:
        row["status"] = type(exc).__name__
    return row


def _parse_range(text: str) -> list[int]:
    try:
        a, b, step = (int(x) for x in text.split(":"))
    except ValueError:
        raise InputError("range must look like A:B:STEP", given=text) from None
    if step <= 0 or b < a:
        raise InputError("range needs A <= B and STEP > 0", given=text)
    return list(range(a, b + 1, step))


def cmd_verify_exel_loring(args, tol):
    if args.n_range:
        ns = _parse_range(args.n_range)
        rows = [_sweep_row_exel(n, tol) for n in ns]
        if args.csv:
            _write_csv(args.csv, rows)
        _emit(args, tol, "verify exel-loring", {"rows": rows})
        return
    qr = _base_qrep(args, tol)
    report = verify_index_formula(qr, tolerances=tol)
    _emit(args, tol, "verify exel-loring", report.to_json())


def cmd_verify_remark25(args, tol):
    qr = voiculescu_qrep(args.n)
    pres = qr.presentation
    a = FreeWord((("a", 1),))
    b = FreeWord((("b", 1),))
    conj = parse_word("a b")
    empty = FreeWord()
    cases = {
        "plain": CommutatorDatum(((a, b),), pres),
        "conjugated": CommutatorDatum(
            ((conj * a * conj.inverse(), conj * b * conj.inverse()),), pres),
        "padded": CommutatorDatum(((a, b), (empty, empty)), pres),
    }
    reports = {label: verify_index_formula(qr, datum=datum, tolerances=tol).to_json()
               for label, datum in cases.items()}
    values = {label: rep["rhs_kappa"] for label, rep in reports.items()}
    result = {
        "reports": reports,
        "kappa_values": values,
        "all_equal": len(set(values.values())) == 1,
    }
    _emit(args, tol, "verify remark25", result)


def cmd_stability(args, tol):
    g, n = args.g, args.n
    u, v = voiculescu_pair(n)
    eye = Unitary.of(np.eye(n))
    base_pairs = [(u, v)] + [(eye, eye)] * (g - 1)
    rows, reports = [], []
    for i in range(args.seeds):
        seed = args.seed + i
        row = {"n": n, "g": g, "seed": seed, "radius": args.radius, "status": "ok"}
        try:
            gen = np.random.default_rng(seed)
            alt_pairs = [(perturbed_copy(a, args.radius, gen),
                          perturbed_copy(b, args.radius, gen))
                         for a, b in base_pairs]
            report = kazhdan_stability(g, base_pairs, alt_pairs,
                                       samples=tol.stability_samples,
                                       margin=tol.branch_margin)
            reports.append(report.to_json())
            row.update({
                "kappa": report.kappa_end.rounded,
                "wn": winding_number_det_segment(
                    Unitary.of(_tuple_product(alt_pairs))).rounded,
                "relator_defect": report.relator_defect_alt,
            })
            if g == 1:
                k_rep = k_invariant(alt_pairs[0][0], alt_pairs[0][1],
                                    threshold=tol.projection_threshold,
                                    gap=tol.projection_gap,
                                    defect_max=tol.defect_max)
                row["k"] = k_rep.rounded
                row["e_defect"] = k_rep.defect_data["e_defect"]
                row["gap"] = k_rep.defect_data["spectral_gap"]
                pres = Presentation.z2()
                qr_alt = QuasiRep(pres, {"a": alt_pairs[0][0], "b": alt_pairs[0][1]},
                                  Z2NormalForm())
                gens = [parse_word(s) for s in pres.generators]
                row["mult_defect"] = mult_defect(
                    qr_alt, gens + [w.inverse() for w in gens]).epsilon
            if not report.equal:
                row["status"] = "mismatch"
        except QrepError as exc:
            row["status"] = type(exc).__name__
            reports.append({"seed": seed, "error": type(exc).__name__,
                            "message": str(exc)})
        rows.append(row)
    if args.csv:
        _write_csv(args.csv, rows)
    ok = all(r["status"] == "ok" for r in rows)
    _emit(args, tol, "stability",
          {"rows": rows, "reports": reports, "all_ok": ok})


def _tuple_product(pairs) -> np.ndarray:
    n = pairs[0][0].dim
    out = np.eye(n, dtype=np.complex128)
    for a, b in pairs:
        out = out @ a.m @ b.m @ a.m.conj().T @ b.m.conj().T
    return out


def cmd_homotopy_gap(args, tol):
    kind, payload = _load_matrix_or_qrep(args.input)
    if kind != "matrix":
        raise InputError("homotopy-gap takes a matrix JSON input")
    value = exel_homotopy_gap(payload, grid=tol.homotopy_grid,
                              margin=tol.branch_margin,
                              cluster_width=tol.cluster_width)
    _emit(args, tol, "homotopy-gap", {"homotopy_gap": value})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _resolve_tolerances(args)
        args.func(args, tol)
    except QrepError as exc:
        print(f"qrep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"qrep: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"qrep: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
