"""Sparse truncated polynomial self-maps of C^n (jets).

A jet collects monomial terms ``c * z^I e_j`` with multi-index ``I``,
component ``j`` and complex coefficient ``c``, for ``1 <= |I| <= D``.  Jets
fix the origin by construction; affine parts live elsewhere.  Storage is a
canonical sparse association ``(I, j) -> c`` with no exactly-zero
coefficients, so two jets are equal iff their term dictionaries are equal.

Term iteration is deterministic: graded by total degree, then by the
anti-lexicographic-from-the-right monomial order used by the homological
operators (see :mod:`srnf.homological`), then by component.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import (
    DegreeOutOfRange,
    DimensionMismatch,
    SingularLinearPart,
    SingularMatrix,
)

# Coefficients below PRUNE_REL_TOL times the largest same-degree coefficient
# are treated as arithmetic noise.
PRUNE_REL_TOL = 1e-14

# Condition-number cap for linear parts that must be inverted.
COND_CAP = 1e12

MultiIndex = tuple[int, ...]
TermKey = tuple[MultiIndex, int]


def monomial_order_key(index: MultiIndex) -> tuple[int, ...]:
    """Sort key for the ordering in which later-variable exponents dominate.

    Sorting multi-indices of one degree by this key puts first the index
    with the largest exponent on z_n, ties broken by z_{n-1}, and so on.
    """
    return tuple(-e for e in reversed(index))


def term_sort_key(key: TermKey) -> tuple:
    index, comp = key
    return (sum(index), monomial_order_key(index), comp)


def multi_indices(n: int, degree: int) -> Iterator[MultiIndex]:
    """All multi-indices of the given total degree in n variables."""
    if n == 1:
        yield (degree,)
        return
    for head in range(degree, -1, -1):
        for tail in multi_indices(n - 1, degree - head):
            yield (head,) + tail


class PolyJet:
    """Truncated polynomial map of C^n fixing the origin.

    Treat instances as immutable: all arithmetic returns new jets.
    """

    __slots__ = ("n", "degree", "terms", "_eval_arrays")

    def __init__(self, n: int, degree: int, terms: Mapping[TermKey, complex] | Iterable = ()):
        if n < 1:
            raise DimensionMismatch(f"dimension must be positive, got {n}")
        if degree < 1:
            raise DegreeOutOfRange(f"truncation degree must be >= 1, got {degree}")
        canonical: dict[TermKey, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for (index, comp), coeff in items:
            index = tuple(int(e) for e in index)
            comp = int(comp)
            coeff = complex(coeff)
            if len(index) != n:
                raise DimensionMismatch(f"multi-index {index} has wrong length for n={n}")
            if any(e < 0 for e in index):
                raise ValueError(f"negative exponent in multi-index {index}")
            total = sum(index)
            if not 1 <= total <= degree:
                raise DegreeOutOfRange(f"term degree {total} outside 1..{degree}")
            if not 0 <= comp < n:
                raise DimensionMismatch(f"component {comp} outside 0..{n - 1}")
            if not np.isfinite(coeff.real) or not np.isfinite(coeff.imag):
                raise ValueError(f"non-finite coefficient at {(index, comp)}")
            if coeff != 0:
                canonical[(index, comp)] = coeff
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", canonical)
        object.__setattr__(self, "_eval_arrays", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PolyJet instances are immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int, degree: int = 1) -> "PolyJet":
        return cls(n, degree, {})

    @classmethod
    def identity(cls, n: int, degree: int = 1) -> "PolyJet":
        return cls.from_linear(np.eye(n), degree)

    @classmethod
    def from_linear(cls, matrix: np.ndarray, degree: int = 1) -> "PolyJet":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {matrix.shape}")
        n = matrix.shape[0]
        terms = {}
        for j in range(n):
            for k in range(n):
                if matrix[j, k] != 0:
                    index = tuple(1 if i == k else 0 for i in range(n))
                    terms[(index, j)] = complex(matrix[j, k])
        return cls(n, degree, terms)

    # -- views ---------------------------------------------------------

    def sorted_terms(self) -> list[tuple[MultiIndex, int, complex]]:
        return [(index, comp, self.terms[(index, comp)])
                for index, comp in sorted(self.terms, key=term_sort_key)]

    def linear_part(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        for (index, comp), coeff in self.terms.items():
            if sum(index) == 1:
                out[comp, index.index(1)] = coeff
        return out

    def max_degree(self) -> int:
        """Largest degree actually present (0 for the zero jet)."""
        return max((sum(index) for index, _ in self.terms), default=0)

    def degrees(self) -> set[int]:
        return {sum(index) for index, _ in self.terms}

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def coefficient(self, index: MultiIndex, comp: int) -> complex:
        return self.terms.get((tuple(index), comp), 0j)

    # -- arithmetic ----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyJet):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __add__(self, other: "PolyJet") -> "PolyJet":
        if not isinstance(other, PolyJet):
            return NotImplemented
        if self.n != other.n:
            raise DimensionMismatch("cannot add jets of different dimensions")
        merged = dict(self.terms)
        for key, coeff in other.terms.items():
            merged[key] = merged.get(key, 0j) + coeff
        merged = {k: c for k, c in merged.items() if c != 0}
        return PolyJet(self.n, max(self.degree, other.degree), merged)

    def __neg__(self) -> "PolyJet":
        return PolyJet(self.n, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PolyJet") -> "PolyJet":
        return self + (-other)

    def scaled(self, factor: complex) -> "PolyJet":
        if factor == 0:
            return PolyJet.zero(self.n, self.degree)
        return PolyJet(self.n, self.degree, {k: factor * c for k, c in self.terms.items()})

    def truncated(self, degree: int) -> "PolyJet":
        if degree < 1:
            raise DegreeOutOfRange(f"truncation degree must be >= 1, got {degree}")
        terms = {k: c for k, c in self.terms.items() if sum(k[0]) <= degree}
        return PolyJet(self.n, degree, terms)

    def pruned(self, rel_tol: float = PRUNE_REL_TOL) -> "PolyJet":
        return PolyJet(self.n, self.degree, _prune_terms(self.terms, rel_tol))

    def max_coeff_diff(self, other: "PolyJet") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0j) - other.terms.get(k, 0j)) for k in keys),
                   default=0.0)

    # -- evaluation ----------------------------------------------------

    def evaluate(self, z) -> np.ndarray:
        """Value of the jet at a point, using exactly the stored terms."""
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.n,):
            raise DimensionMismatch(f"point has shape {z.shape}, expected ({self.n},)")
        if not self.terms:
            return np.zeros(self.n, dtype=complex)
        exps, comps, coeffs = self._evaluation_arrays()
        monomials = np.prod(z[None, :] ** exps, axis=1)
        out = np.zeros(self.n, dtype=complex)
        np.add.at(out, comps, coeffs * monomials)
        return out

    def _evaluation_arrays(self):
        cached = self._eval_arrays
        if cached is None:
            items = self.sorted_terms()
            exps = np.array([index for index, _, _ in items], dtype=np.int64)
            comps = np.array([comp for _, comp, _ in items], dtype=np.int64)
            coeffs = np.array([coeff for _, _, coeff in items], dtype=complex)
            cached = (exps, comps, coeffs)
            object.__setattr__(self, "_eval_arrays", cached)
        return cached

    def __repr__(self):
        return f"PolyJet(n={self.n}, degree={self.degree}, terms={len(self.terms)})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for index, comp, coeff in self.sorted_terms():
            mono = "*".join(f"z{k + 1}^{e}" if e > 1 else f"z{k + 1}"
                            for k, e in enumerate(index) if e)
            parts.append(f"({coeff:.6g})*{mono}*e{comp + 1}")
        return " + ".join(parts)


class HomogeneousPart(PolyJet):
    """A jet supported in a single total degree ``q``."""

    __slots__ = ("q",)

    def __init__(self, n: int, q: int, terms: Mapping[TermKey, complex] | Iterable = ()):
        if q < 1:
            raise DegreeOutOfRange(f"homogeneity degree must be >= 1, got {q}")
        super().__init__(n, q, terms)
        for index, _ in self.terms:
            if sum(index) != q:
                raise DegreeOutOfRange(
                    f"term {index} has degree {sum(index)}, expected {q}")
        object.__setattr__(self, "q", q)

    @classmethod
    def zero_part(cls, n: int, q: int) -> "HomogeneousPart":
        return cls(n, q, {})


# -- term-level helpers ------------------------------------------------


def _prune_terms(terms: Mapping[TermKey, complex], rel_tol: float) -> dict[TermKey, complex]:
    if rel_tol <= 0 or not terms:
        return dict(terms)
    degree_max: dict[int, float] = {}
    for (index, _), coeff in terms.items():
        d = sum(index)
        a = abs(coeff)
        if a > degree_max.get(d, 0.0):
            degree_max[d] = a
    return {key: coeff for key, coeff in terms.items()
            if abs(coeff) >= rel_tol * degree_max[sum(key[0])]}


# Scalar polynomials inside the composition kernel are bucketed by total
# degree and keyed by a mixed-radix packing of the exponents; integer key
# addition then realizes monomial multiplication without carries, because
# every surviving exponent is bounded by the truncation degree.
_Buckets = dict[int, dict[int, complex]]


def _bucket_mul(a: _Buckets, b: _Buckets, cap: int) -> _Buckets:
    out: _Buckets = {}
    for da, ta in a.items():
        for db, tb in b.items():
            d = da + db
            if d > cap:
                continue
            bucket = out.setdefault(d, {})
            for ca, va in ta.items():
                for cb, vb in tb.items():
                    key = ca + cb
                    bucket[key] = bucket.get(key, 0j) + va * vb
    return out


# -- operations --------------------------------------------------------


def compose_truncated(f: PolyJet, g: PolyJet, degree: int, *, prune: bool = True) -> PolyJet:
    """Jet of ``f`` after ``g``, with all terms of degree > ``degree`` dropped.

    ``g`` fixes the origin by type, so every substituted factor has degree
    >= 1 and the truncation commutes with the term-by-term expansion.
    """
    if f.n != g.n:
        raise DimensionMismatch(f"composing maps of dimensions {f.n} and {g.n}")
    if degree < 1:
        raise DegreeOutOfRange(f"truncation degree must be >= 1, got {degree}")
    n = f.n
    base = degree + 1
    radix = [base ** k for k in range(n)]

    def encode(index: MultiIndex) -> int:
        return sum(e * r for e, r in zip(index, radix))

    decode_cache: dict[int, MultiIndex] = {}

    def decode(code: int) -> MultiIndex:
        index = decode_cache.get(code)
        if index is None:
            remaining = code
            digits = []
            for _ in range(n):
                digits.append(remaining % base)
                remaining //= base
            index = tuple(digits)
            decode_cache[code] = index
        return index

    one: _Buckets = {0: {0: 1.0 + 0j}}
    components: list[_Buckets] = [{} for _ in range(n)]
    for (index, comp), coeff in g.terms.items():
        d = sum(index)
        if d <= degree:
            components[comp].setdefault(d, {})[encode(index)] = coeff

    power_cache: list[dict[int, _Buckets]] = [{0: one} for _ in range(n)]

    def component_power(k: int, e: int) -> _Buckets:
        cache = power_cache[k]
        if e not in cache:
            top = max(m for m in cache if m <= e)
            acc = cache[top]
            for m in range(top + 1, e + 1):
                acc = _bucket_mul(acc, components[k], degree)
                cache[m] = acc
        return cache[e]

    out: dict[TermKey, complex] = {}
    for (index, comp), coeff in f.terms.items():
        if sum(index) > degree:
            continue
        acc = one
        for k, e in enumerate(index):
            if e == 0:
                continue
            acc = _bucket_mul(acc, component_power(k, e), degree)
            if not acc:
                break
        for bucket in acc.values():
            for code, value in bucket.items():
                key = (decode(code), comp)
                out[key] = out.get(key, 0j) + coeff * value
    out = {k: c for k, c in out.items() if c != 0}
    if prune:
        out = _prune_terms(out, PRUNE_REL_TOL)
    return PolyJet(n, degree, out)


def jet_inverse(f: PolyJet, degree: int, *, cond_cap: float = COND_CAP) -> PolyJet:
    """Compositional inverse jet, built degree by degree.

    The result ``g`` satisfies ``f o g = g o f = id`` through ``degree``.
    """
    linear = f.linear_part()
    _check_invertible(linear, cond_cap, SingularLinearPart)
    inv_linear = np.linalg.inv(linear)
    g = PolyJet.from_linear(inv_linear, degree)
    target = PolyJet.identity(f.n, degree)
    for d in range(2, degree + 1):
        residual = compose_truncated(f, g, d, prune=False) - target
        correction: dict[TermKey, complex] = {}
        for (index, comp), coeff in residual.terms.items():
            if sum(index) != d:
                continue
            for i in range(f.n):
                if inv_linear[i, comp] != 0:
                    key = (index, i)
                    correction[key] = correction.get(key, 0j) - inv_linear[i, comp] * coeff
        if correction:
            g = g + PolyJet(f.n, degree, correction)
    return g.pruned()


def linear_conjugate(f: PolyJet, matrix: np.ndarray, degree: int, *,
                     prune: bool = True) -> PolyJet:
    """Jet of ``Q^{-1} o f o Q`` truncated at ``degree``."""
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (f.n, f.n):
        raise DimensionMismatch(f"matrix shape {matrix.shape} does not match n={f.n}")
    _check_invertible(matrix, COND_CAP, SingularMatrix)
    inv = np.linalg.inv(matrix)
    inner = compose_truncated(f, PolyJet.from_linear(matrix, 1), degree, prune=False)
    out: dict[TermKey, complex] = {}
    for (index, comp), coeff in inner.terms.items():
        for i in range(f.n):
            if inv[i, comp] != 0:
                key = (index, i)
                out[key] = out.get(key, 0j) + inv[i, comp] * coeff
    out = {k: c for k, c in out.items() if c != 0}
    if prune:
        out = _prune_terms(out, PRUNE_REL_TOL)
    return PolyJet(f.n, degree, out)


def homogeneous_part(f: PolyJet, q: int) -> HomogeneousPart:
    """Exactly the degree-``q`` terms of ``f``."""
    if not 1 <= q <= f.degree:
        raise DegreeOutOfRange(f"degree {q} outside 1..{f.degree}")
    terms = {key: coeff for key, coeff in f.terms.items() if sum(key[0]) == q}
    return HomogeneousPart(f.n, q, terms)


def _check_invertible(matrix: np.ndarray, cond_cap: float, error_cls) -> None:
    if not np.all(np.isfinite(matrix)):
        raise error_cls("matrix has non-finite entries")
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > cond_cap:
        raise error_cls(f"matrix is singular or ill-conditioned (cond={cond:.3g})")
