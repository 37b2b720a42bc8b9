"""Built-in identity catalog and the generic (a_m, b_m) transform."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..evaluator import DoubleProductSpec, ProductSpec
from ..polynomials import Poly, degree, format_poly, normalize, padd, positive_from
from ..sequences import WeightFamily, ZeroOneTM
from ..terms import FactoredTerm, classify
from .expr import Expr, parse_closed_form, to_text


class InvalidFamily(ValueError):
    pass


@dataclass(frozen=True)
class FamilyDef:
    """prod_{m >= m0} b(m)/a(m) = C with integer polynomials a, b (constant term first)."""

    a_of_m: Poly
    b_of_m: Poly
    m0: int
    C: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "a_of_m", normalize(self.a_of_m))
        object.__setattr__(self, "b_of_m", normalize(self.b_of_m))


MAX_FAMILY_DEGREE = 4


def remark_transform(f: FamilyDef) -> DoubleProductSpec:
    """Inner lemma term with a = a_m - 1, b = b_m - 1; the inner product is b_m/a_m."""
    for name, p in (("a", f.a_of_m), ("b", f.b_of_m)):
        if degree(p) > MAX_FAMILY_DEGREE:
            raise InvalidFamily(f"{name}(m) has degree {degree(p)} > {MAX_FAMILY_DEGREE}")
        # lemma parameters a_m - 1, b_m - 1 must exceed -1
        if not positive_from(p, f.m0):
            raise InvalidFamily(f"{name}(m) = {format_poly(p)} must be >= 1 for m >= {f.m0}")
    return DoubleProductSpec.from_lemma(padd(f.a_of_m, (-1,)), padd(f.b_of_m, (-1,)), f.m0)


@dataclass(frozen=True)
class IdentityEntry:
    id: str
    spec: ProductSpec | DoubleProductSpec
    expected: Expr | None
    source: str
    notes: str = ""
    flagged: bool = False
    expect_fail: bool = False
    family: FamilyDef | None = field(default=None, compare=False)

    @property
    def expected_text(self) -> str | None:
        return None if self.expected is None else to_text(self.expected)

    @property
    def is_double(self) -> bool:
        return isinstance(self.spec, DoubleProductSpec)

    @property
    def convergence(self) -> str:
        if self.is_double:
            return "double"
        kind, _ = classify(self.spec.term)
        return kind.value


def _single(triples, weight, n0) -> ProductSpec:
    return ProductSpec(FactoredTerm.from_triples(triples, n0), weight, n0)


def make_entry(id, spec, expected, source, **kw) -> IdentityEntry:
    return IdentityEntry(id, spec, None if expected is None else parse_closed_form(expected), source, **kw)


def sondow_base(B: int) -> IdentityEntry:
    """prod_{n >= 0} ((Bn+1)/(Bn+2))^((-1)^{t_B(n)}) = 1/sqrt(B)."""
    spec = _single([(B, 1, 1), (B, 2, -1)], WeightFamily.ones_base(B), 0)
    notes = "" if B == 2 else "weight is not mean-zero; evaluated by the heuristic contraction"
    return make_entry(f"sondow_base_{B}", spec, f"1/sqrt({B})", "base-B digit-count product", notes=notes)


FLAG_NOTE = "interpretation: geometric multiplier, unverified against original source"

BORWEIN = {
    "borwein_n2": FamilyDef((1, 0, 1), (-1, 0, 1), 2, "pi*cosh(pi)"),
    "borwein_n3": FamilyDef((1, 0, 0, 1), (-1, 0, 0, 1), 2, "2/3"),
    "borwein_n4": FamilyDef((1, 0, 0, 0, 1), (-1, 0, 0, 0, 1), 2,
                            "pi*sinh(pi)/(cosh(sqrt(2)*pi)-cos(sqrt(2)*pi))"),
}


def fm_R_single_spec() -> ProductSpec:
    """R = prod_{n >= 1} ((4n+1)(4n+2)/(4n(4n+3)))^eps_n."""
    return _single([(4, 1, 1), (4, 2, 1), (4, 0, -1), (4, 3, -1)], WeightFamily.epsilon(), 1)


def fm_R_double_spec() -> DoubleProductSpec:
    # inner lemma term with a = 4m(4m+3) - 1, b = (4m+1)(4m+2) - 1, outer weight eps_m
    return DoubleProductSpec.from_lemma((-1, 12, 16), (1, 12, 16), 1, WeightFamily.epsilon())


def _build() -> tuple[IdentityEntry, ...]:
    eps = WeightFamily.epsilon()
    out = [
        make_entry("woods_robbins", _single([(2, 1, 1), (2, 2, -1)], eps, 0), "sqrt(2)/2",
               "Woods-Robbins product"),
        make_entry("ars_quarter", _single([(4, 1, 1), (4, 3, -1)], eps, 0), "1/2",
               "eps-weighted (4n+1)/(4n+3)"),
        make_entry("ars_unit", _single([(1, 1, 1), (4, 5, 1), (1, 2, -1), (4, 3, -1)], eps, 0), "1",
               "eps-weighted (n+1)(4n+5)/((n+2)(4n+3))"),
        make_entry("ars_gamma", _single([(4, 1, 1), (4, 4, 1), (4, 2, -1), (4, 3, -1)], ZeroOneTM(), 0),
               "pi^(3/4)*sqrt(2)/gamma_quarter", "t_n-weighted product with Gamma(1/4)",
               notes="needs gamma_quarter configured"),
        make_entry("acms_geometric", _single([(2, 1, 1), (2, 2, -1)], WeightFamily.geometric(Fraction(-3, 2)), 0),
               "2^(-2/5)", "exponent (-3/2)^{t_n}", flagged=True,
               notes=FLAG_NOTE + "; t_n read as the binary digit count"),
        make_entry("acms_tn_eps", _single([(2, 2, 1), (2, 1, -1)], ZeroOneTM(), 0), "2^(1/4)",
               "exponent t_n*eps_n", flagged=True,
               notes=FLAG_NOTE + "; literal reading t_n*eps_n = -t_n diverges"),
    ]
    out += [sondow_base(B) for B in (2, 3, 4, 10)]
    out += [
        make_entry("thm1_pi", DoubleProductSpec.from_lemma((-2, 0, 4), (-1, 0, 4), 1), "pi/2",
               "double product, a = 4m^2 - 2, b = 4m^2 - 1"),
        make_entry("thm1_sqrt2", DoubleProductSpec.from_lemma((2, 16, 16), (3, 16, 16), 0), "sqrt(2)",
               "double product, a = (4m+1)(4m+3) - 1, b = (4m+2)^2 - 1"),
        make_entry("corollary_pi_sqrt2", DoubleProductSpec.from_lemma((-2, 0, 16), (-1, 0, 16), 1), "pi*sqrt(2)/4",
               "double product, a = 16m^2 - 2, b = 16m^2 - 1"),
        make_entry("fm_R_single", fm_R_single_spec(), None, "Flajolet-Martin product R",
               notes="no closed form known"),
        make_entry("fm_R_double", fm_R_double_spec(), None, "double product for R with weight eps_n eps_m",
               notes="no closed form known"),
    ]
    for id, fam in BORWEIN.items():
        notes = ""
        if id == "borwein_n2":
            notes = "stated value suspected typographical; verify reports Fail by design"
        out.append(make_entry(id, remark_transform(fam), fam.C, f"transform of prod b_m/a_m, {format_poly(fam.b_of_m)}"
                          f" over {format_poly(fam.a_of_m)}", notes=notes, expect_fail=id == "borwein_n2",
                          family=fam))
    return tuple(out)


_CATALOG: tuple[IdentityEntry, ...] | None = None


def catalog() -> list[IdentityEntry]:
    global _CATALOG
    if _CATALOG is None:
        _CATALOG = _build()
    return list(_CATALOG)


def lookup(id: str, entries=None) -> IdentityEntry:
    for e in entries if entries is not None else catalog():
        if e.id == id:
            return e
    raise KeyError(id)
