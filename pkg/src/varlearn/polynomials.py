"""Sparse real polynomials in ``x1..xn`` and graded monomial bases.

Monomials are exponent tuples. The global monomial order is: total degree
ascending, and graded reverse-lexicographic (``x1 > x2 > ...``) within a
degree, so ``x1^2, x1*x2, x2^2, x1*x3, ...``. Vandermonde columns, kernel
vectors and JSON term lists all use this order.
"""
from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import CapacityError, InvalidInputError

__all__ = [
    "BasisMode",
    "MonomialBasis",
    "Polynomial",
    "PolynomialSet",
    "monomial_basis",
    "evaluate",
    "jacobian",
    "round_coefficients",
    "homogenize",
    "parse_polynomial",
    "read_polynomials",
    "write_polynomials",
]

MAX_BASIS_SIZE = 5_000_000

Exponent = tuple[int, ...]


def monomial_key(e: Sequence[int]) -> tuple:
    """Sort key realising the global graded order."""
    return (sum(e), tuple(reversed(e)))


class BasisMode(str, enum.Enum):
    DEGREE_AT_MOST = "degree_at_most"
    DEGREE_EXACTLY = "degree_exactly"
    EXPLICIT = "explicit"


def _exponents_of_degree(n: int, d: int) -> list[Exponent]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    out.sort(key=monomial_key)
    return out


@dataclass(frozen=True)
class MonomialBasis:
    n: int
    exponents: tuple[Exponent, ...]
    mode: BasisMode = BasisMode.EXPLICIT
    degree: int | None = None

    def __post_init__(self):
        exps = tuple(tuple(int(v) for v in e) for e in self.exponents)
        if any(len(e) != self.n for e in exps):
            raise InvalidInputError("exponent vectors must have length n")
        if any(v < 0 for e in exps for v in e):
            raise InvalidInputError("exponents must be nonnegative")
        if len(set(exps)) != len(exps):
            raise InvalidInputError("duplicate exponent vectors in basis")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "mode", BasisMode(self.mode))
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(exps)})

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self) -> Iterator[Exponent]:
        return iter(self.exponents)

    def __getitem__(self, i: int) -> Exponent:
        return self.exponents[i]

    def index(self, e: Sequence[int]) -> int:
        return self._index[tuple(e)]

    def exponent_array(self) -> np.ndarray:
        return np.array(self.exponents, dtype=int).reshape(len(self), self.n)

    def polynomial(self, coefficients: Sequence[float]) -> "Polynomial":
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape != (len(self),):
            raise InvalidInputError("coefficient vector length differs from basis size")
        return Polynomial(self.n, dict(zip(self.exponents, coefficients.tolist())))


def monomial_basis(n: int, d: int, mode: BasisMode | str = BasisMode.DEGREE_AT_MOST) -> MonomialBasis:
    """All monomials of degree ``<= d`` or ``== d`` in ``n`` variables."""
    mode = BasisMode(mode)
    if n < 1 or d < 0:
        raise InvalidInputError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    if mode is BasisMode.EXPLICIT:
        raise InvalidInputError("explicit bases are built with MonomialBasis(...) directly")
    size = math.comb(n + d, d) if mode is BasisMode.DEGREE_AT_MOST else math.comb(n + d - 1, d)
    if size > MAX_BASIS_SIZE:
        raise CapacityError(f"basis of size {size} exceeds cap {MAX_BASIS_SIZE}")
    degrees = range(d + 1) if mode is BasisMode.DEGREE_AT_MOST else [d]
    exps = [e for k in degrees for e in _exponents_of_degree(n, k)]
    return MonomialBasis(n, tuple(exps), mode, d)


def power_table(points: np.ndarray, max_degree: int) -> np.ndarray:
    """``table[k, :, j] = points[:, j] ** k`` by repeated multiplication."""
    pts = np.asarray(points, dtype=float)
    table = np.empty((max_degree + 1,) + pts.shape)
    table[0] = 1.0
    for k in range(1, max_degree + 1):
        table[k] = table[k - 1] * pts
    return table


def monomial_values(points: np.ndarray, exponents: Sequence[Exponent]) -> np.ndarray:
    """Matrix of monomial evaluations, one row per point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    if len(exponents) == 0:
        return np.zeros((m, 0))
    exps = np.asarray(exponents, dtype=int).reshape(len(exponents), n)
    table = power_table(pts, int(exps.max()))
    cols = np.arange(n)
    out = np.ones((m, len(exps)))
    for k, e in enumerate(exps):
        nz = np.flatnonzero(e)
        if nz.size:
            out[:, k] = np.prod(table[e[nz], :, cols[nz]], axis=0)
    return out


class Polynomial:
    """A real polynomial stored as ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], float] | Iterable = ()):
        if nvars < 0:
            raise InvalidInputError("nvars must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exponent, float] = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != nvars or any(v < 0 for v in e):
                raise InvalidInputError(f"bad exponent {e} for {nvars} variables")
            acc[e] = acc.get(e, 0.0) + float(c)
        self.nvars = nvars
        self._terms = {e: acc[e] for e in sorted(acc, key=monomial_key) if acc[e] != 0.0}

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c: float) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, j: int) -> "Polynomial":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1.0})

    # -- container protocol ---------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, float]:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def coefficient_vector(self, basis: MonomialBasis) -> np.ndarray:
        vec = np.zeros(len(basis))
        for e, c in self._terms.items():
            vec[basis.index(e)] = c
        return vec

    def coefficients(self) -> np.ndarray:
        return np.fromiter(self._terms.values(), dtype=float, count=len(self._terms))

    # -- arithmetic -----------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.nvars != self.nvars:
            raise InvalidInputError("polynomials live in different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, float(other))
        self._check(other)
        return Polynomial(self.nvars, list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.nvars, {e: c * float(other) for e, c in self._terms.items()})
        self._check(other)
        out: list[tuple[Exponent, float]] = []
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                out.append((tuple(a + b for a, b in zip(e1, e2)), c1 * c2))
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial.constant(self.nvars, 1.0)
        for _ in range(int(k)):
            result = result * self
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Polynomial)
            and other.nvars == self.nvars
            and other._terms == self._terms
        )

    def __hash__(self):
        return hash((self.nvars, tuple(self._terms.items())))

    def allclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= atol for k in keys)

    # -- calculus and evaluation ----------------------------------------------
    def derivative(self, j: int) -> "Polynomial":
        out = {}
        for e, c in self._terms.items():
            if e[j]:
                f = list(e)
                f[j] -= 1
                out[tuple(f)] = c * e[j]
        return Polynomial(self.nvars, out)

    def __call__(self, points) -> np.ndarray | float:
        return evaluate(self, points)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)

    def to_json(self) -> dict:
        return {"n": self.nvars, "terms": [[c, list(e)] for e, c in self._terms.items()]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Polynomial":
        try:
            return cls(int(obj["n"]), [(tuple(e), float(c)) for c, e in obj["terms"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed polynomial JSON: {exc}") from None


def evaluate(p: Polynomial, points) -> np.ndarray | float:
    """Evaluate ``p`` at one point (returns float) or at rows of a matrix."""
    arr = np.asarray(points, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    if pts.shape[1] != p.nvars:
        raise InvalidInputError(f"point has {pts.shape[1]} coordinates, polynomial has {p.nvars} variables")
    if p.is_zero():
        vals = np.zeros(pts.shape[0])
    else:
        exps = list(p._terms)
        vals = monomial_values(pts, exps) @ p.coefficients()
    return float(vals[0]) if single else vals


class PolynomialSet:
    """An ordered list of polynomials over a shared variable count."""

    def __init__(self, polynomials: Iterable[Polynomial] = (), nvars: int | None = None):
        polys = list(polynomials)
        if nvars is None:
            if not polys:
                raise InvalidInputError("empty PolynomialSet needs an explicit nvars")
            nvars = polys[0].nvars
        if any(f.nvars != nvars for f in polys):
            raise InvalidInputError("all polynomials must share the variable count")
        self.nvars = nvars
        self.polynomials = polys
        self._gradient = None

    def __len__(self):
        return len(self.polynomials)

    def __iter__(self):
        return iter(self.polynomials)

    def __getitem__(self, i):
        return self.polynomials[i]

    def __repr__(self):
        return f"PolynomialSet(nvars={self.nvars}, k={len(self)})"

    def evaluate(self, points) -> np.ndarray:
        """``(m, k)`` matrix of values, or length-``k`` vector for one point."""
        arr = np.asarray(points, dtype=float)
        pts = np.atleast_2d(arr)
        vals = np.column_stack([evaluate(f, pts) for f in self.polynomials]) if self.polynomials else np.zeros((pts.shape[0], 0))
        return vals[0] if arr.ndim == 1 else vals

    def gradient_polynomials(self) -> list[list[Polynomial]]:
        if self._gradient is None:
            self._gradient = [[f.derivative(j) for j in range(self.nvars)] for f in self.polynomials]
        return self._gradient

    def jacobian(self, u) -> np.ndarray:
        """``(k, n)`` Jacobian at ``u``; ``(m, k, n)`` stack for a matrix of points."""
        arr = np.asarray(u, dtype=float)
        pts = np.atleast_2d(arr)
        k, n = len(self), self.nvars
        jac = np.zeros((pts.shape[0], k, n))
        for i, row in enumerate(self.gradient_polynomials()):
            for j, g in enumerate(row):
                if not g.is_zero():
                    jac[:, i, j] = evaluate(g, pts)
        return jac[0] if arr.ndim == 1 else jac

    def to_json(self) -> dict:
        return {"n": self.nvars, "polynomials": [f.to_json()["terms"] for f in self.polynomials]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "PolynomialSet":
        n = int(obj["n"])
        return cls([Polynomial.from_json({"n": n, "terms": t}) for t in obj["polynomials"]], nvars=n)


def jacobian(F: PolynomialSet | Sequence[Polynomial], u) -> np.ndarray:
    if not isinstance(F, PolynomialSet):
        F = PolynomialSet(F)
    return F.jacobian(u)


def _round_half_away(c: float, digits: int) -> float:
    scale = 10.0**digits
    return math.copysign(math.floor(abs(c) * scale + 0.5) / scale, c)


def round_coefficients(p: Polynomial, digits: int = 0) -> Polynomial:
    """Round every coefficient to ``digits`` decimals, half away from zero."""
    if digits < 0:
        raise InvalidInputError("digits must be nonnegative")
    return Polynomial(p.nvars, {e: _round_half_away(c, digits) for e, c in p})


def homogenize(p: Polynomial) -> Polynomial:
    """Append a variable ``z`` and pad every term to the total degree."""
    d = p.degree
    return Polynomial(p.nvars + 1, {e + (d - sum(e),): c for e, c in p})


# -- text format -------------------------------------------------------------

def _format_number(c: float) -> str:
    if float(c).is_integer() and abs(c) < 1e15:
        return str(int(c))
    return repr(float(c))


def _format_monomial(e: Exponent) -> str:
    parts = []
    for j, k in enumerate(e):
        if k == 1:
            parts.append(f"x{j + 1}")
        elif k > 1:
            parts.append(f"x{j + 1}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render like ``-1.25*x1^2*x3 + 0.5*x2``, highest degree first."""
    if p.is_zero():
        return "0"
    items = sorted(p, key=lambda t: (-sum(t[0]), tuple(reversed(t[0]))))
    out = []
    for i, (e, c) in enumerate(items):
        mono = _format_monomial(e)
        mag = abs(c)
        if mono and mag == 1.0:
            body = mono
        elif mono:
            body = f"{_format_number(mag)}*{mono}"
        else:
            body = _format_number(mag)
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


_SPLIT = re.compile(r"(?<![eE*^])([+-])")
_VAR = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_polynomial(text: str, nvars: int | None = None) -> Polynomial:
    """Parse the text format; ``**`` is accepted as a power alias."""
    s = text.strip().replace("**", "^").replace(" ", "").replace("\t", "")
    if not s:
        raise InvalidInputError("empty polynomial text")
    pieces = _SPLIT.split(s)
    terms: list[tuple[dict[int, int], float]] = []
    sign = 1.0
    for piece in pieces:
        if piece in ("+", "-"):
            sign = sign * (-1.0 if piece == "-" else 1.0)
            continue
        if not piece:
            continue
        coeff = sign
        powers: dict[int, int] = {}
        for factor in piece.split("*"):
            mv = _VAR.match(factor)
            if mv:
                j = int(mv.group(1))
                if j < 1:
                    raise InvalidInputError(f"variable index must start at 1: {factor!r}")
                powers[j] = powers.get(j, 0) + int(mv.group(2) or 1)
                continue
            try:
                coeff *= float(factor)
            except ValueError:
                raise InvalidInputError(f"cannot parse factor {factor!r} in {text!r}") from None
        terms.append((powers, coeff))
        sign = 1.0
    top = max((j for pw, _ in terms for j in pw), default=0)
    if nvars is None:
        nvars = max(top, 1)
    if top > nvars:
        raise InvalidInputError(f"variable x{top} exceeds nvars={nvars}")
    out = []
    for pw, c in terms:
        e = [0] * nvars
        for j, k in pw.items():
            e[j - 1] += k
        out.append((tuple(e), c))
    return Polynomial(nvars, out)


def read_polynomials(path, nvars: int | None = None) -> PolynomialSet:
    """Read a polynomial file: JSON (``{n, polynomials}`` or ``{n, terms}``) or text lines."""
    with open(path) as fh:
        raw = fh.read()
    stripped = raw.lstrip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON ({exc})") from None
        if "polynomials" in obj:
            return PolynomialSet.from_json(obj)
        return PolynomialSet([Polynomial.from_json(obj)])
    lines = [ln.split("#", 1)[0].strip() for ln in raw.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidInputError(f"{path}: no polynomials")
    if nvars is None:
        nvars = max(parse_polynomial(ln).nvars for ln in lines)
    return PolynomialSet([parse_polynomial(ln, nvars) for ln in lines], nvars=nvars)


def write_polynomials(F: PolynomialSet, path) -> None:
    with open(path, "w") as fh:
        for f in F:
            fh.write(format_polynomial(f) + "\n")
