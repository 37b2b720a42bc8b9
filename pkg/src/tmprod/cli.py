"""tmprod command line: list, eval, verify and transform.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 precision not achieved.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .evaluator import (CERTIFIED, COLLAPSED, DIRECT, HEURISTIC, DivergentSpec, EvalOptions, InvalidParameter,
                        MissingCollapsedForm, PrecisionNotAchieved)
from .identities import (FAIL, FamilyDef, IdentityEntry, InvalidFamily, RegistryError, catalog, entry_to_json,
                         evaluate_entry, load_registry, merge_entries, parse_closed_form, remark_transform, verify)
from .identities.catalog import make_entry
from .numeric import NumericContext

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_PRECISION = 0, 1, 2, 3
MAX_DIGITS = 10000
MODES = ("certified", "heuristic", "collapsed", "direct")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    digits: int = 30
    mode: str = "certified"
    threads: int = 1
    constants: dict | None = None
    output: str = "json"
    outer_terms: int | None = None
    inner_digits: int | None = None

    def __post_init__(self):
        if not 1 <= self.digits <= MAX_DIGITS:
            raise UsageError(f"--digits must be in [1, {MAX_DIGITS}]")
        if self.threads < 1:
            raise UsageError("--threads must be positive")

    def options(self) -> EvalOptions:
        mode = HEURISTIC if self.mode == "heuristic" else CERTIFIED
        return EvalOptions(target_digits=self.digits, mode=mode, outer_terms=self.outer_terms,
                           inner_digits=self.inner_digits)

    @property
    def double_mode(self) -> str:
        return DIRECT if self.mode == "direct" else COLLAPSED

    def context(self) -> NumericContext:
        return NumericContext.for_digits(self.digits, constants=self.constants or {})


def _load_constants(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read constants file {path}: {exc}") from None
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise UsageError("constants file must map names to decimal strings")
    return data


def _entries(args) -> list[IdentityEntry]:
    builtin = catalog()
    if not args.registry:
        return builtin
    try:
        return merge_entries(builtin, load_registry(args.registry), args.allow_override)
    except (OSError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _config(args) -> CliConfig:
    return CliConfig(args.digits, args.mode, args.threads, _load_constants(args.constants), args.output,
                     getattr(args, "outer_terms", None), getattr(args, "inner_digits", None))


def _emit(obj, output: str, plain_lines) -> None:
    if output == "json":
        print(json.dumps(obj, indent=2))
    else:
        for line in plain_lines:
            print(line)


# -- subcommands -------------------------------------------------------------------

def cmd_list(args) -> int:
    rows = [{"id": e.id, "source": e.source, "expected": e.expected_text or "none",
             "convergence": e.convergence, "flagged": e.flagged, "notes": e.notes} for e in _entries(args)]
    width = max(len(r["id"]) for r in rows)
    _emit(rows, args.output, (f"{r['id']:<{width}}  {r['expected']:<50}  {r['convergence']:<22}  {r['source']}"
                              for r in rows))
    return EXIT_OK


def _eval_one(entry: IdentityEntry, cfg: CliConfig) -> dict:
    result = evaluate_entry(entry, cfg.options(), cfg.double_mode, cfg.context())
    return {"id": entry.id, **result.as_dict()}


def cmd_eval(args) -> int:
    cfg = _config(args)
    target = args.target
    if Path(target).is_file():
        try:
            entries = load_registry(target)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    else:
        entries = [e for e in _entries(args) if e.id == target]
        if not entries:
            raise UsageError(f"unknown identity id {target!r} (see `tmprod list`)")
    rows = [_eval_one(e, cfg) for e in entries]
    payload = rows[0] if len(rows) == 1 else rows
    _emit(payload, cfg.output, (f"{r['id']}: {r['value']} +- {r['abs_error']}"
                                f"{'' if r['certified'] else ' (not certified)'}" for r in rows))
    return EXIT_OK


def _verify_all(entries, cfg: CliConfig):
    ctx, opts = cfg.context(), cfg.options()

    def run(entry):
        return verify(ctx, entry, opts, cfg.double_mode)
    if cfg.threads == 1:
        return [run(e) for e in entries]
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        # map keeps input order whatever the completion order
        return list(pool.map(run, entries))


def cmd_verify(args) -> int:
    cfg = _config(args)
    entries = _entries(args)
    if not args.all:
        if not args.ids:
            raise UsageError("give identity ids or --all")
        by_id = {e.id: e for e in entries}
        missing = [i for i in args.ids if i not in by_id]
        if missing:
            raise UsageError(f"unknown identity id(s): {', '.join(missing)}")
        entries = [by_id[i] for i in args.ids]
    verdicts = _verify_all(entries, cfg)
    rows = [v.as_dict() for v in verdicts]
    _emit(rows, cfg.output, (f"{v.id:<20} {v.status:<13} {v.value or '-'}  +- {v.abs_error or '-'}"
                             f"  gap {v.gap or '-'}  {v.reason}" for v in verdicts))
    expected_fail = {e.id for e in entries if e.expect_fail}
    failed = [v for v in verdicts if v.status == FAIL and v.certified and v.id not in expected_fail]
    return EXIT_FAIL if failed else EXIT_OK


_MONOMIAL = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*(m(?:\s*\^\s*(\d+))?)?")


def _parse_poly_text(text: str) -> tuple:
    """Sum of integer monomials in m, e.g. "m^3 - 1" or "16*m^2 + 12m - 1"."""
    coeffs: dict[int, int] = {}
    pos, body = 0, text.replace(" ", "")
    while pos < len(body):
        match = _MONOMIAL.match(body, pos)
        sign, digits, var, power = match.groups()
        if match.end() == pos or not (digits or var) or (pos and not sign):
            raise ValueError(text)
        k = (int(power) if power else 1) if var else 0
        coeffs[k] = coeffs.get(k, 0) + (-1 if sign == "-" else 1) * int(digits or 1)
        pos = match.end()
    if not coeffs:
        raise ValueError(text)
    return tuple(coeffs.get(k, 0) for k in range(max(coeffs) + 1))


def _parse_poly(text: str) -> tuple:
    """Coefficients, constant first ("-1,0,0,1", "[-1, 0, 0, 1]") or a polynomial in m ("m^3-1")."""
    try:
        if "m" in text:
            return _parse_poly_text(text)
        values = json.loads(text) if text.strip().startswith("[") else [int(x) for x in text.split(",")]
        return tuple(int(x) for x in values)
    except ValueError:
        raise UsageError(f"bad polynomial {text!r}; use integers constant-first or a polynomial in m") from None


def cmd_transform(args) -> int:
    cfg = _config(args)
    family = FamilyDef(_parse_poly(args.a_poly), _parse_poly(args.b_poly), args.m0, args.C)
    try:
        if args.C is not None:
            parse_closed_form(args.C)
        spec = remark_transform(family)
    except (InvalidFamily, SyntaxError) as exc:
        raise UsageError(str(exc)) from None
    entry = make_entry(args.id, spec, args.C, "transform", family=family)
    doc = entry_to_json(entry)
    if args.eval:
        doc["result"] = _eval_one(entry, cfg)
        if args.C is not None:
            doc["verify"] = verify(cfg.context(), entry, cfg.options(), cfg.double_mode).as_dict()
    lines = [json.dumps(entry_to_json(entry))]
    if "result" in doc:
        r = doc["result"]
        lines.append(f"value: {r['value']} +- {r['abs_error']}")
        if "verify" in doc:
            lines.append(f"verify: {doc['verify']['status']} (gap {doc['verify']['gap']})")
    _emit(doc, cfg.output, lines)
    if "verify" in doc and doc["verify"]["status"] == FAIL and doc["verify"]["certified"]:
        return EXIT_FAIL
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--digits", type=int, default=30, help=f"target decimal digits (max {MAX_DIGITS})")
    p.add_argument("--mode", choices=MODES, default="certified",
                   help="certified/heuristic error contract; collapsed/direct pick the double-product route")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--constants", help="JSON file mapping constant names (gamma_quarter) to decimal strings")
    p.add_argument("--registry", help="JSON registry of extra identities")
    p.add_argument("--allow-override", action="store_true", help="let registry ids shadow builtin ids")
    p.add_argument("--output", choices=("json", "plain"), default="json")
    p.add_argument("--outer-terms", type=int, help="outer truncation M for --mode direct")
    p.add_argument("--inner-digits", type=int, help="inner accuracy for --mode direct")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tmprod", description="Thue-Morse weighted infinite products")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list catalogued identities")
    _common(p)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("eval", help="evaluate an identity by id or a registry file")
    p.add_argument("target")
    _common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="compare products with their expected closed forms")
    p.add_argument("ids", nargs="*")
    p.add_argument("--all", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("transform", help="build the double product for prod b(m)/a(m) = C")
    p.add_argument("--a-poly", required=True)
    p.add_argument("--b-poly", required=True)
    p.add_argument("--m0", type=int, required=True)
    p.add_argument("--C", default=None, help="closed form of prod b(m)/a(m)")
    p.add_argument("--id", default="transform")
    p.add_argument("--eval", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        return args.func(args)
    except PrecisionNotAchieved as exc:
        print(f"tmprod: precision not achieved: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (UsageError, DivergentSpec, InvalidParameter, MissingCollapsedForm, RegistryError) as exc:
        print(f"tmprod: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
