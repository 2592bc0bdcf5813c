"""Command line: construct, verify, iso, recognize, key and enum over JSON files.

Exit codes: 0 success, 1 bad input (schema or parameters), 2 verification
failed, 3 refused (outside the classified range or an infinite group where a
finite one is needed).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .abgroup import GroupError
from .bichar import BicharacterError
from .classify import RefusedError, canonical_key, iso_any
from .enumeration import MAX_GROUP, MAX_N, enumerate_request
from .graded_matrix import GradedAlgebra, ParameterError, construct_matrix_grading, verify_associative_grading
from .involution import GradedAlgebraWithAntiAut, InvolutionParams, verify_involution
from .lie_grading import LieGradingParams, construct_lie, verify_lie_grading
from .recognize import RecognitionError, recognize_matrix_grading
from .serialize import (SchemaError, algebra_from_json, algebra_to_json, dumps, group_from_json, params_from_json,
                        params_to_json, table_to_json, validate)

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_REFUSED = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code: int, payload: dict):
        super().__init__(payload.get("message", ""))
        self.code = code
        self.payload = payload


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": dict({"kind": kind, "message": message}, **extra)}


def _read(src: str):
    """A path, '-' for stdin, or inline JSON."""
    try:
        if src == "-":
            return json.load(sys.stdin)
        if src.lstrip().startswith(("{", "[")):
            return json.loads(src)
        return json.loads(Path(src).read_text())
    except FileNotFoundError:
        raise _Fail(EXIT_INPUT, _error("io", f"no such file: {src}")) from None
    except json.JSONDecodeError as exc:
        raise _Fail(EXIT_INPUT, _error("json", f"invalid JSON in {src}: {exc}")) from None


def _write(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _is_algebra(obj) -> bool:
    return isinstance(obj, dict) and "basis" in obj


def _params_of(obj, args):
    """Parameters from a parameter file, or recognized from an associative algebra file."""
    if not _is_algebra(obj):
        return params_from_json(obj)
    A = algebra_from_json(obj)
    if not isinstance(A, GradedAlgebra) or A.kind != "associative":
        raise ParameterError("only plain associative algebras can be recognized")
    return _recognize(A, args).canonical


def _recognize(A: GradedAlgebra, args):
    rep = verify_associative_grading(A)
    if not rep.ok:
        raise _Fail(EXIT_VERIFY, dict(_error("verify", "input is not a grading of M_n"), report=rep.to_json()))
    return recognize_matrix_grading(A, tol=args.tol, seed=args.seed)


def _one_input(args):
    if not args.inputs or len(args.inputs) != 1:
        raise _Fail(EXIT_INPUT, _error("usage", f"{args.command} takes exactly one --in"))
    return _read(args.inputs[0])


# ---------------------------------------------------------------------------
# subcommands


def cmd_construct(args) -> int:
    p = params_from_json(_one_input(args))
    if isinstance(p, LieGradingParams):
        A = construct_lie(p)
    elif isinstance(p, InvolutionParams):
        A = p.build()
    else:
        A = construct_matrix_grading(p)
    _write(args, dumps(algebra_to_json(A)))
    return EXIT_OK


def verify_any(A):
    if isinstance(A, GradedAlgebraWithAntiAut):
        return verify_involution(A)
    if A.kind == "lie":
        return verify_lie_grading(A)
    return verify_associative_grading(A)


def cmd_verify(args) -> int:
    A = algebra_from_json(_one_input(args))
    rep = verify_any(A)
    _write(args, dumps(rep.to_json()))
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_iso(args) -> int:
    if not args.inputs or len(args.inputs) != 2:
        raise _Fail(EXIT_INPUT, _error("usage", "iso takes exactly two --in"))
    p1, p2 = (_params_of(_read(src), args) for src in args.inputs)
    w = iso_any(p1, p2)
    out = {"isomorphic": w is not None}
    if w is not None:
        out["witness"] = w.to_json()
    _write(args, dumps(out))
    return EXIT_OK


def cmd_recognize(args) -> int:
    A = algebra_from_json(_one_input(args))
    if not isinstance(A, GradedAlgebra) or A.kind != "associative":
        raise ParameterError("recognition needs a plain associative algebra")
    r = _recognize(A, args)
    _write(args, dumps(params_to_json(r.canonical)))
    print(f"beta residual {r.beta_residual:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_key(args) -> int:
    p = _params_of(_one_input(args), args)
    _write(args, canonical_key(p) + "\n")
    return EXIT_OK


def cmd_enum(args) -> int:
    req = _one_input(args)
    validate(req, "enum_request")
    G = group_from_json(req["group"])
    table = enumerate_request(G, req["algebra"], int(req["n"]), max_n=args.max_n, max_group=args.max_group)
    if "family" in req:
        table.entries = [e for e in table.entries if e.family == req["family"]]
    _write(args, dumps(table_to_json(table)))
    # the summary goes to stdout next to a written table, to stderr otherwise
    print(table.summary(), end="", file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


COMMANDS = {"construct": cmd_construct, "verify": cmd_verify, "iso": cmd_iso, "recognize": cmd_recognize,
            "key": cmd_key, "enum": cmd_enum}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradings", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--in", dest="inputs", action="append", metavar="PATH",
                        help="input JSON file, '-' for stdin, or inline JSON (iso takes two)")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--tol", type=float, default=1e-8, help="numeric tolerance for recognition")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-n", type=int, default=MAX_N)
        sp.add_argument("--max-group", type=int, default=MAX_GROUP)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except _Fail as f:
        payload, code = f.payload, f.code
    except SchemaError as exc:
        payload, code = _error("schema", str(exc), path=exc.path), EXIT_INPUT
    except RefusedError as exc:
        payload, code = _error("refused", str(exc)), EXIT_REFUSED
    except RecognitionError as exc:
        payload, code = _error("recognition", str(exc)), EXIT_INPUT
    except (ParameterError, GroupError, BicharacterError, ValueError) as exc:
        payload, code = _error("parameter", str(exc)), EXIT_INPUT
    sys.stdout.write(dumps(payload))
    return code


def main():
    sys.exit(run())
