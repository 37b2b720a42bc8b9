"""Catalogued product identities, expected-value expressions and verification."""

from .catalog import (BORWEIN, FamilyDef, IdentityEntry, InvalidFamily, catalog, fm_R_double_spec,
                      fm_R_single_spec, lookup, remark_transform, sondow_base)
from .expr import ExprSyntaxError, evaluate, monomial, parse_closed_form, same_monomial, to_text
from .registry import RegistryError, entry_from_json, entry_to_json, load_registry, merge_entries
from .verify import FAIL, PASS, UNVERIFIABLE, Verdict, evaluate_entry, fm_phi, fm_R, verify

__all__ = [
    "BORWEIN", "FAIL", "PASS", "UNVERIFIABLE", "ExprSyntaxError", "FamilyDef", "IdentityEntry", "InvalidFamily",
    "RegistryError", "Verdict", "catalog", "entry_from_json", "entry_to_json", "evaluate", "evaluate_entry",
    "fm_R", "fm_R_double_spec", "fm_R_single_spec", "fm_phi", "load_registry", "lookup", "merge_entries",
    "monomial", "parse_closed_form", "remark_transform", "same_monomial", "sondow_base", "to_text", "verify",
]
