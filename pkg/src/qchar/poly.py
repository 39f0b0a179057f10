"""Sparse multivariate polynomials with complex coefficients.

Polynomials here are the exponents ``q`` in a joint characteristic function of
the form ``exp(q(t)) * prod_j phi_j(t_j)``.  They never carry a constant term,
because ``q(0) = 0`` is part of the definition.

Text grammar (whitespace insensitive)::

    poly   := [sign] term (sign term)*
    term   := factor ('*' factor)*
    factor := atom ['^' INT]
    atom   := NUMBER | NUMBER 'i' | 'i' | VAR | '(' poly ')'
    VAR    := 't1' | 't2' | ... | 'tn'

Multiplication and powers must be written explicitly and ``i`` is always the
imaginary unit.  Parenthesised sub-expressions may contain constants, so
``(1-2i)*t1*t2`` is a single term with a complex coefficient.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ArityError, ConstantTermError, PolySyntaxError

__all__ = [
    "MultiPoly",
    "ViolationKind",
    "Violation",
    "AdmissibilityReport",
    "PolyStats",
    "parse_poly",
    "format_poly",
    "eval_poly",
    "poly_pow",
    "conj_reflect",
    "check_q_independence",
    "check_q_identical",
    "check_admissible",
    "poly_stats",
]

MAX_EXPONENT = 2**31 - 1

Exponent = tuple  # tuple[int, ...]


def _grlex_key(exponent):
    return (sum(exponent), exponent)


class MultiPoly:
    """Immutable sparse polynomial in ``arity`` real variables.

    ``terms`` maps exponent tuples to nonzero complex coefficients.  Zero
    coefficients are dropped on construction and a nonzero constant term is
    rejected.
    """

    __slots__ = ("_arity", "_terms")

    def __init__(self, arity: int, terms: Mapping[Sequence[int], complex] | None = None):
        if not isinstance(arity, (int, np.integer)) or arity < 1:
            raise ArityError(f"arity must be a positive integer, got {arity!r}")
        arity = int(arity)
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(k) for k in exps)
            if len(exps) != arity:
                raise ArityError(f"exponent {exps} does not have length {arity}")
            if any(k < 0 for k in exps):
                raise ValueError(f"negative exponent in {exps}")
            if any(k > MAX_EXPONENT for k in exps):
                raise OverflowError(f"exponent in {exps} exceeds {MAX_EXPONENT}")
            coef = complex(coef)
            if not (math.isfinite(coef.real) and math.isfinite(coef.imag)):
                raise OverflowError(f"non-finite coefficient {coef} at {exps}")
            if coef == 0:
                continue
            if not any(exps):
                raise ConstantTermError(f"constant term {coef} present; q(0) must be 0")
            clean[exps] = clean[exps] + coef if exps in clean else coef
        ordered = {k: clean[k] for k in sorted(clean, key=_grlex_key) if clean[k] != 0}
        self._arity = arity
        self._terms = MappingProxyType(ordered)

    @classmethod
    def zero(cls, arity: int) -> MultiPoly:
        return cls(arity, {})

    @property
    def arity(self) -> int:
        return self._arity

    @property
    def terms(self) -> Mapping[Exponent, complex]:
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Maximum total degree (0 for the zero polynomial)."""
        return max((sum(k) for k in self._terms), default=0)

    @property
    def min_degree(self) -> int:
        """Minimum total degree over present terms (0 for the zero polynomial)."""
        return min((sum(k) for k in self._terms), default=0)

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Exponent, complex]]:
        return iter(self._terms.items())

    def __bool__(self):
        return not self.is_zero

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._arity == other._arity and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self._arity, frozenset(self._terms.items())))

    def __repr__(self):
        return f"MultiPoly({self._arity}, {dict(self._terms)!r})"

    def __str__(self):
        return format_poly(self)

    def _check_same(self, other):
        if self._arity != other._arity:
            raise ArityError(f"arity mismatch: {self._arity} vs {other._arity}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_same(other)
        out = dict(self._terms)
        for k, c in other:
            out[k] = out.get(k, 0j) + c
        return MultiPoly(self._arity, out)

    def __neg__(self):
        return MultiPoly(self._arity, {k: -c for k, c in self})

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check_same(other)
            return MultiPoly(self._arity, _mul_terms(self._terms, other._terms))
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly(self._arity, {k: c * other for k, c in self})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n):
        return poly_pow(self, n)

    def __call__(self, *t):
        return eval_poly(self, t)


def _mul_terms(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out[k] + ca * cb if k in out else ca * cb
    return out


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i(?![\w]))?
  | (?P<var>t(?P<index>\d+))
  | (?P<unit>i(?![\w]))
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str  # 'num', 'var', 'op', 'end'
    value: object
    pos: int


def _tokenize(text: str) -> list[_Token]:
    text = text.replace("−", "-")
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.group("num") is not None:
            value = float(m.group("num"))
            coef = complex(0.0, value) if m.group("imag") else complex(value, 0.0)
            tokens.append(_Token("num", coef, pos))
        elif m.group("unit") is not None:
            tokens.append(_Token("num", complex(0.0, 1.0), pos))
        elif m.group("var") is not None:
            tokens.append(_Token("var", int(m.group("index")), pos))
        elif m.group("op") is not None:
            tokens.append(_Token("op", m.group("op"), pos))
        pos = m.end()
    tokens.append(_Token("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive-descent parser producing raw term dictionaries.

    Intermediate results may contain a constant term; only the final result
    is checked for ``q(0) = 0``.
    """

    def __init__(self, text: str, arity: int):
        self.text = text
        self.arity = arity
        self.tokens = _tokenize(text)
        self.i = 0
        self.zero_exp = (0,) * arity

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        raise PolySyntaxError(message, tok.pos, self.text)

    def accept(self, op):
        if self.tok.kind == "op" and self.tok.value == op:
            self.i += 1
            return True
        return False

    def parse(self) -> dict:
        if self.tok.kind == "end":
            self.error("empty polynomial")
        out = self.poly()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.value!r}")
        return out

    def poly(self) -> dict:
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        acc = self.scaled(self.term(), sign)
        while True:
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                return acc
            for k, c in self.scaled(self.term(), sign).items():
                acc[k] = acc[k] + c if k in acc else c

    @staticmethod
    def scaled(terms: dict, sign: int) -> dict:
        return terms if sign > 0 else {k: -c for k, c in terms.items()}

    def term(self) -> dict:
        acc = self.factor()
        while self.accept("*"):
            acc = _mul_terms(acc, self.factor())
        return acc

    def factor(self) -> dict:
        base = self.atom()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "num" or tok.value.imag != 0 or not float(tok.value.real).is_integer():
                self.error("exponent must be a non-negative integer literal")
            self.i += 1
            n = int(tok.value.real)
            if n > MAX_EXPONENT:
                raise OverflowError(f"exponent {n} at position {tok.pos} is too large")
            result = {self.zero_exp: complex(1.0, 0.0)}
            for _ in range(n):
                result = _mul_terms(result, base)
            return result
        return base

    def atom(self) -> dict:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return {self.zero_exp: tok.value}
        if tok.kind == "var":
            self.i += 1
            if tok.value < 1:
                self.error(f"variable t{tok.value} is not valid", tok)
            if tok.value > self.arity:
                raise ArityError(
                    f"variable t{tok.value} at position {tok.pos} exceeds arity {self.arity}"
                )
            exps = [0] * self.arity
            exps[tok.value - 1] = 1
            return {tuple(exps): complex(1.0, 0.0)}
        if self.accept("("):
            inner = self.poly()
            if not self.accept(")"):
                self.error("expected ')'")
            return inner
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {tok.value!r}")


def parse_poly(text: str, arity: int) -> MultiPoly:
    """Parse ``text`` into a canonical :class:`MultiPoly` of the given arity.

    Like terms are merged and zero coefficients dropped.  Raises
    :class:`PolySyntaxError` (with position), :class:`ConstantTermError` or
    :class:`ArityError`.
    """
    if not isinstance(arity, int) or arity < 1:
        raise ArityError(f"arity must be a positive integer, got {arity!r}")
    terms = _Parser(text, arity).parse()
    const = terms.get((0,) * arity, 0)
    if const != 0:
        raise ConstantTermError(f"constant term {const} present in {text!r}; q(0) must be 0")
    terms.pop((0,) * arity, None)
    return MultiPoly(arity, terms)


# --------------------------------------------------------------------------
# Formatting
# --------------------------------------------------------------------------


def _fmt_real(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_monomial(exps) -> str:
    parts = []
    for j, k in enumerate(exps, start=1):
        if k == 1:
            parts.append(f"t{j}")
        elif k > 1:
            parts.append(f"t{j}^{k}")
    return "*".join(parts)


def _fmt_term(coef: complex, exps) -> tuple[bool, str]:
    mono = _fmt_monomial(exps)
    re_, im = coef.real, coef.imag
    negative = False
    if im == 0:
        negative = re_ < 0
        mag = abs(re_)
        cstr = "" if mag == 1 else _fmt_real(mag)
    elif re_ == 0:
        negative = im < 0
        mag = abs(im)
        cstr = "i" if mag == 1 else _fmt_real(mag) + "i"
    else:
        sign = "-" if im < 0 else "+"
        cstr = f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i)"
    body = f"{cstr}*{mono}" if cstr else mono
    return negative, body


def format_poly(p: MultiPoly) -> str:
    """Canonical text with terms in graded-lexicographic order."""
    if p.is_zero:
        return "0"
    out = []
    for n, (exps, coef) in enumerate(p):
        negative, body = _fmt_term(coef, exps)
        if n == 0:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


# --------------------------------------------------------------------------
# Arithmetic
# --------------------------------------------------------------------------


def eval_poly(p: MultiPoly, t: Sequence):
    """Evaluate ``sum_k a_k prod_j t_j**k_j``.

    ``t`` has one entry per variable; entries may be scalars or broadcastable
    arrays, in which case an array is returned.
    """
    if len(t) != p.arity:
        raise ArityError(f"expected {p.arity} coordinates, got {len(t)}")
    t = [np.asarray(tj, dtype=float) for tj in t]
    shape = np.broadcast_shapes(*(tj.shape for tj in t))
    acc = np.zeros(shape, dtype=complex)
    for exps, coef in p:
        mono = np.ones(shape)
        for tj, k in zip(t, exps):
            if k:
                # |t|**k with the sign restored keeps q(-t) bitwise reflected
                power = np.abs(tj) ** k
                mono = mono * (np.copysign(power, tj) if k % 2 else power)
        acc = acc + coef * mono
    if acc.ndim == 0:
        return complex(acc)
    return acc


def poly_pow(p: MultiPoly, n: int) -> MultiPoly:
    """Expanded ``p**n`` for a positive integer ``n``.

    Powers of a polynomial without univariate monomials may contain
    univariate monomials; that is expected.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"power must be a positive integer, got {n!r}")
    n = int(n)
    top = max((max(k) for k in p.terms), default=0)
    if top * n > MAX_EXPONENT:
        raise OverflowError(f"exponent {top}*{n} exceeds {MAX_EXPONENT}")
    result = None
    base = p
    while n:
        if n & 1:
            result = base if result is None else result * base
        n >>= 1
        if n:
            base = base * base
    return result


def conj_reflect(p: MultiPoly) -> MultiPoly:
    """The polynomial ``t -> conj(q(-t))``: ``a_k -> (-1)**|k| * conj(a_k)``."""
    return MultiPoly(
        p.arity, {k: (-1) ** sum(k) * c.conjugate() for k, c in p}
    )


# --------------------------------------------------------------------------
# Admissibility
# --------------------------------------------------------------------------


class ViolationKind(str, enum.Enum):
    UNIVARIATE_MONOMIAL = "UnivariateMonomial"
    PARITY_VIOLATION = "ParityViolation"

    @property
    def condition(self) -> str:
        """Label of the admissibility condition this kind breaks."""
        return "i" if self is ViolationKind.UNIVARIATE_MONOMIAL else "ii"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    exponent: tuple
    detail: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "exponent": list(self.exponent), "detail": self.detail}


@dataclass(frozen=True)
class AdmissibilityReport:
    verdict: bool
    violations: tuple = field(default_factory=tuple)
    mode: str = "independence"

    def __post_init__(self):
        if self.verdict != (not self.violations):
            raise ValueError("verdict must be true exactly when there are no violations")

    @property
    def kinds(self) -> set:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violations": [v.to_dict() for v in self.violations],
        }


def _parity_violation(exps, coef) -> Violation | None:
    deg = sum(exps)
    if deg % 2 == 0 and coef.imag != 0:
        return Violation(
            ViolationKind.PARITY_VIOLATION,
            exps,
            f"total degree {deg} is even but coefficient {coef} is not real",
        )
    if deg % 2 == 1 and coef.real != 0:
        return Violation(
            ViolationKind.PARITY_VIOLATION,
            exps,
            f"total degree {deg} is odd but coefficient {coef} is not purely imaginary",
        )
    return None


def check_q_independence(p: MultiPoly) -> AdmissibilityReport:
    """Check that ``p`` can appear in a Q-independence factorisation.

    Two conditions are checked term by term, exactly on the stored
    coefficients: no monomial depends on a single variable, and a coefficient
    is real for even total degree and purely imaginary for odd total degree.
    """
    if p.arity < 2:
        raise ArityError("Q-independence needs at least two variables")
    violations = []
    for exps, coef in p:
        if sum(1 for k in exps if k) == 1:
            var = next(j for j, k in enumerate(exps, start=1) if k)
            violations.append(
                Violation(
                    ViolationKind.UNIVARIATE_MONOMIAL,
                    exps,
                    f"monomial depends only on t{var}",
                )
            )
        pv = _parity_violation(exps, coef)
        if pv is not None:
            violations.append(pv)
    return AdmissibilityReport(not violations, tuple(violations), "independence")


def check_q_identical(p: MultiPoly) -> AdmissibilityReport:
    """Parity-only check for the one-variable (Q-identical) case."""
    if p.arity != 1:
        raise ArityError("Q-identical distribution needs exactly one variable")
    violations = [v for v in (_parity_violation(k, c) for k, c in p) if v is not None]
    return AdmissibilityReport(not violations, tuple(violations), "identical")


def check_admissible(p: MultiPoly) -> AdmissibilityReport:
    """Dispatch on arity: one variable uses the Q-identical check."""
    return check_q_identical(p) if p.arity == 1 else check_q_independence(p)


class PolyStats(NamedTuple):
    s: int
    a: float
    d: int


def poly_stats(p: MultiPoly) -> PolyStats:
    """Number of monomials, largest coefficient modulus and total degree."""
    if p.is_zero:
        raise ValueError("statistics are undefined for the zero polynomial")
    return PolyStats(len(p), max(abs(c) for _, c in p), p.degree)


def random_sparse_poly(
    rng: np.random.Generator,
    arity: int = 2,
    max_degree: int = 4,
    max_terms: int = 4,
    coefficients: Iterable[complex] = (1, -1, 1j, -1j, 2, -2, 2j, -2j),
) -> MultiPoly:
    """Draw a random sparse polynomial without constant term."""
    coefficients = [complex(c) for c in coefficients]
    exps = [
        e
        for e in np.ndindex(*(max_degree + 1,) * arity)
        if 1 <= sum(e) <= max_degree
    ]
    n_terms = int(rng.integers(1, max_terms + 1))
    picks = rng.choice(len(exps), size=n_terms, replace=False)
    terms = {}
    for idx in picks:
        terms[tuple(int(k) for k in exps[idx])] = coefficients[int(rng.integers(len(coefficients)))]
    return MultiPoly(arity, terms)
