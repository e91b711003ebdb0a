"""Command-line entry point: every verifier and search as a subcommand with a JSON report."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from .gsignature import ActionData, PermutationType, verify_action_data
from .groupring import GroupRingMatrix, character_norm_product, det_2x2, determinant as gr_determinant, regular_expand
from .lattice import (
    IntSymMatrix,
    determinant,
    leading_minors,
    norm_one_classes,
    norm_one_split,
    reduce_to_diagonal,
)
from .numtheory import (
    DefectDataset,
    check_cancellation_theorem,
    check_lemma_no_solution,
    check_theorem_two,
    defect_sum,
    find_conjecture_counterexample,
    verify_identities,
    verify_theorem_391,
)
from .report import THREADS_ENV, Report, default_threads, fixture_path
from .search import (
    PartitionStats,
    SearchConstraints,
    recertify,
    search_blocks,
    search_defect_solution,
    search_fixed_point_data,
    search_linking_matrix,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


def _read_input(name: str) -> Path:
    """A file path, or the name of a fixture shipped with the package."""
    path = Path(name)
    if path.exists():
        return path
    packaged = fixture_path(name)
    if packaged.is_file():
        return Path(str(packaged))
    raise FileNotFoundError(f"no such file: {name}")


def _load_json(name: str) -> dict:
    return json.loads(_read_input(name).read_text())


# commands -----------------------------------------------------------------------


def cmd_verify_identities(args) -> Report:
    return verify_identities(args.m)


def cmd_lemma(args) -> Report:
    return check_lemma_no_solution(args.m)


def cmd_cancellation(args) -> Report:
    return check_cancellation_theorem(args.m)


def cmd_theorem2(args) -> Report:
    return check_theorem_two(args.m, args.k_bound)


def cmd_391(args) -> Report:
    return verify_theorem_391()


def cmd_counterexample(args) -> Report:
    return find_conjecture_counterexample(
        args.m, args.p, args.t, term_count=args.terms, budget=args.budget, threads=args.threads
    )


def cmd_defect_sum(args) -> Report:
    data = DefectDataset.from_dict(_load_json(args.file))
    values = {str(s): str(defect_sum(data, s)) for s in args.s}
    return Report(
        command="defect-sum",
        inputs={"file": args.file, "s": args.s},
        verdict="pass",
        counts={"terms": len(data.terms)},
        certificates=[data.to_dict()],
        details={"values": values},
    )


def cmd_gsig_verify(args) -> Report:
    data = ActionData.from_dict(_load_json(args.file))
    result = verify_action_data(data)
    body = result.to_dict()
    return Report(
        command="gsig verify",
        inputs={"file": args.file},
        verdict=body["verdict"],
        counts={"powers": len(result.rows), "failures": len(result.failures())},
        certificates=[data.to_dict()],
        details={"powers": body["powers"]},
    )


def cmd_gr_det(args) -> Report:
    doc = _load_json(args.file)
    mat = GroupRingMatrix.from_dict(doc)
    det = det_2x2(mat) if mat.shape == (2, 2) else gr_determinant(mat)
    details = {"det": str(det), "coeffs": list(det.coeffs), "hermitian": mat.is_hermitian()}
    q = args.q if args.q is not None else doc.get("q")
    if q is not None and details["hermitian"]:
        gram = regular_expand(mat, int(q))
        details["q"] = int(q)
        details["expanded_det"] = determinant(gram)
        details["character_product"] = character_norm_product(det.restrict(int(q)))
    return Report(
        command="gr det",
        inputs={"file": args.file, "q": q},
        verdict="pass" if det.is_one() else "fail",
        counts={"m": mat.m, "rows": mat.shape[0]},
        details=details,
    )


def lattice_report(a: IntSymMatrix, source: str) -> Report:
    det = determinant(a)
    minors = leading_minors(a)
    definite = all(x > 0 for x in minors)
    red = reduce_to_diagonal(a)
    transform_ok = a.congruent(red.transform) == red.matrix
    details = {
        "rank": a.n,
        "det": det,
        "leading_minors": minors,
        "positive_definite": definite,
        "reduction": {
            "op_count": red.op_count,
            "passes": red.passes,
            "identity": red.is_identity,
            "diagonal": red.is_diagonal,
            "stalled": red.stalled,
            "transform_verified": transform_ok,
        },
    }
    split = None
    if definite and det == 1:
        details["norm_one_classes"] = len(norm_one_classes(a))
        split = norm_one_split(a)
    details["standard"] = split is not None
    return Report(
        command="lattice check",
        inputs={"file": source},
        verdict="pass" if split is not None else "fail",
        counts={"reduction_ops": red.op_count},
        certificates=[{"split": split}] if split is not None else [],
        details=details,
    )


def cmd_lattice_check(args) -> Report:
    return lattice_report(IntSymMatrix.load(_read_input(args.file)), args.file)


def _cursor_digest(constraints: SearchConstraints, prune: bool) -> str:
    blob = json.dumps({"c": constraints.to_dict(), "prune": prune}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _read_cursor(path: Path, digest: str):
    if not path.exists():
        return 0, [], {}
    done, hits, stats, seen = 0, [], {}, None
    for line in path.read_text().splitlines():
        key, _, value = line.partition(" ")
        if key == "config":
            seen = value
        elif key == "blocks_done":
            done = int(value)
        elif key == "stats":
            stats = json.loads(value)
        elif key == "hit":
            hits.append(json.loads(value))
    if seen != digest:
        raise ValueError(f"cursor {path} belongs to a different search configuration")
    return done, hits, stats


def _write_cursor(path: Path, digest: str, done: int, hits: list, stats: PartitionStats) -> None:
    lines = [f"config {digest}", f"blocks_done {done}", f"stats {json.dumps(stats.__dict__, sort_keys=True)}"]
    lines += [f"hit {json.dumps(h, sort_keys=True)}" for h in hits]
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def cmd_search_matrix(args) -> Report:
    constraints = SearchConstraints.from_dict(_load_json(args.config))
    prune = not args.no_prune
    stats = PartitionStats()
    hits: list[dict] = []
    skip = 0
    cursor = Path(args.cursor) if args.cursor else None
    digest = _cursor_digest(constraints, prune)
    if cursor is not None:
        skip, hits, saved = _read_cursor(cursor, digest)
        for k, v in saved.items():
            setattr(stats, k, v)

    def on_block(idx, cands):
        hits.extend(c.params for c in cands)
        if cursor is not None:
            _write_cursor(cursor, digest, idx + 1, hits, stats)

    for _ in search_linking_matrix(constraints, threads=args.threads, prune=prune, stats=stats,
                                   skip_blocks=skip, on_block=on_block):
        pass

    certificates = [recertify(constraints, params) for params in hits]
    return Report(
        command="search matrix",
        inputs={"config": constraints.to_dict(), "prune": prune},
        verdict=("found" if all(c["certified"] for c in certificates) else "fail") if certificates else "none",
        counts={"space_size": constraints.space_size(), "blocks": len(search_blocks(constraints)),
                **stats.__dict__},
        certificates=certificates,
    )


def cmd_search_defect(args) -> Report:
    sols = search_defect_solution(args.p, args.s)
    return Report(
        command="search defect",
        inputs={"p": args.p, "s": args.s},
        verdict="found" if sols else "none",
        counts={"solutions": len(sols)},
        certificates=[[list(pr) for pr in sol] for sol in sols],
    )


def cmd_search_action(args) -> Report:
    perm = PermutationType.parse(args.perm)
    found = search_fixed_point_data(args.m, perm, modulo_generator=args.modulo_generator)
    return Report(
        command="search action",
        inputs={"m": args.m, "perm": str(perm), "modulo_generator": args.modulo_generator},
        verdict="found" if found else "none",
        counts={"datasets": len(found)},
        certificates=[d.to_dict() for d in found],
    )


# parser ----------------------------------------------------------------------------


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def build_parser() -> argparse.ArgumentParser:
    threads = argparse.ArgumentParser(add_help=False)
    threads.add_argument("--threads", type=_positive, default=argparse.SUPPRESS,
                         help=f"worker processes (default from ${THREADS_ENV}, else 1)")

    parser = argparse.ArgumentParser(prog="periodicmaps", parents=[threads],
                                     description="Exact verifiers and searches for periodic maps on definite 4-manifolds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, parent=sub):
        p = parent.add_parser(name, parents=[threads], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("verify-identities", cmd_verify_identities, "kernel and defect identities at one conductor")
    p.add_argument("--m", type=int, required=True)
    p = add("check-lemma", cmd_lemma, "no single defect term equals 1")
    p.add_argument("--m", type=int, required=True)
    p = add("check-cancellation", cmd_cancellation, "equal defect terms force equal data up to sign")
    p.add_argument("--m", type=int, required=True)
    p = add("check-theorem2", cmd_theorem2, "sphere-plus-orbit equation solutions")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k-bound", type=int, default=50)
    add("verify-391", cmd_391, "three unit pairs mod 9 summing to 1 also sum to 1 at zeta^3")
    p = add("find-counterexample", cmd_counterexample, "defect sum t at zeta but not at zeta^p")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--terms", type=int, default=None, help="number of pairs (default t + 2)")
    p.add_argument("--budget", type=int, default=10_000_000)
    p = add("defect-sum", cmd_defect_sum, "evaluate a defect dataset file")
    p.add_argument("--file", required=True)
    p.add_argument("--s", type=int, nargs="+", default=[1])

    gsig = sub.add_parser("gsig", help="G-signature tools").add_subparsers(dest="action", required=True)
    p = add("verify", cmd_gsig_verify, "check an ActionData file at every power", gsig)
    p.add_argument("--file", required=True)

    gr = sub.add_parser("gr", help="group ring tools").add_subparsers(dest="action", required=True)
    p = add("det", cmd_gr_det, "determinant of a group ring matrix file", gr)
    p.add_argument("--file", required=True)
    p.add_argument("--q", type=int, default=None, help="subgroup index for the integer expansion")

    lat = sub.add_parser("lattice", help="integral form tools").add_subparsers(dest="action", required=True)
    p = add("check", cmd_lattice_check, "determinant, definiteness, reduction, norm-1 split", lat)
    p.add_argument("--file", required=True)

    search = sub.add_parser("search", help="exhaustive searches").add_subparsers(dest="action", required=True)
    p = add("matrix", cmd_search_matrix, "linking matrices with standard expansion", search)
    p.add_argument("--config", required=True)
    p.add_argument("--no-prune", action="store_true", help="certify every tuple directly")
    p.add_argument("--cursor", default=None, help="checkpoint file; resumes if present")
    p = add("defect", cmd_search_defect, "s pairs mod p with defect sum s", search)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p = add("action", cmd_search_action, "pseudofree fixed point data for C_{p^2}", search)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--perm", required=True, help='e.g. "2(5)" or "(3)+(1)"')
    p.add_argument("--modulo-generator", action="store_true", help="identify data differing by T -> T^u")
    return parser


def run(argv=None) -> tuple[int, Report | None]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (exc.code if isinstance(exc.code, int) else EXIT_ERROR), None
    if not hasattr(args, "threads"):
        args.threads = default_threads()
    try:
        report = args.func(args)
    except (ValueError, KeyError, TypeError, OSError, ArithmeticError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR, None
    return (EXIT_OK if report.ok else EXIT_NEGATIVE), report


def main(argv=None) -> int:
    code, report = run(argv)
    if report is not None:
        sys.stdout.write(report.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
