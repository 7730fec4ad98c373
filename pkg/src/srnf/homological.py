"""Homological operators on homogeneous polynomial maps.

For a fixed adapted triangular linear part ``T``, the degree-``q`` operator
sends ``h`` to ``h o T - T o h``.  In the monomial basis ordered so that
larger exponents on later variables come first, the operator matrix is
upper triangular with diagonal ``l^I - l_j``; back-substitution along that
ordering splits any homogeneous part into a resonant piece (kept in the
normal form) plus an operator image (removable by conjugation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeMismatch, DegreeOutOfRange, IllConditionedResonance
from .linalg import SpectrumData
from .polymap import (
    HomogeneousPart,
    MultiIndex,
    PolyJet,
    TermKey,
    compose_truncated,
    monomial_order_key,
    multi_indices,
    term_sort_key,
)
from .subresonance import DEFAULT_SR_TOL, is_subresonant_monomial

DEFAULT_RES_TOL = 1e-9

# Divisors between the resonance cutoff and this relative size are reported
# as small-divisor warnings.
SMALL_DIVISOR_REL = 1e-6


def order_compare(a: TermKey, b: TermKey) -> int:
    """Compare two same-degree basis positions; returns -1, 0 or 1.

    Exponents are compared from the last variable down, larger first; full
    multi-index ties fall back to the component, smaller first.
    """
    (ia, ja), (ib, jb) = a, b
    if len(ia) != len(ib):
        raise DegreeMismatch(f"multi-indices {ia} and {ib} differ in dimension")
    if sum(ia) != sum(ib):
        raise DegreeMismatch(f"multi-indices {ia} and {ib} differ in degree")
    ka = (monomial_order_key(ia), ja)
    kb = (monomial_order_key(ib), jb)
    return -1 if ka < kb else (0 if ka == kb else 1)


@dataclass(frozen=True)
class BasisOrdering:
    """All degree-``q`` monomial basis positions in ascending order."""

    q: int
    n: int
    pairs: tuple[TermKey, ...]
    rank: dict[TermKey, int] = field(repr=False)

    def __len__(self):
        return len(self.pairs)


def basis_ordering(n: int, q: int) -> BasisOrdering:
    if q < 1:
        raise DegreeOutOfRange(f"degree must be >= 1, got {q}")
    pairs = sorted(
        ((index, comp) for index in multi_indices(n, q) for comp in range(n)),
        key=term_sort_key)
    rank = {pair: r for r, pair in enumerate(pairs)}
    return BasisOrdering(q=q, n=n, pairs=tuple(pairs), rank=rank)


def basis_dimension(n: int, q: int) -> int:
    """dim of the space of q-homogeneous maps: n * C(q + n - 1, n - 1)."""
    return n * math.comb(q + n - 1, n - 1)


def apply_M(spectrum: SpectrumData, h: HomogeneousPart) -> HomogeneousPart:
    """The operator value ``h o T - T o h``, computed by jet composition."""
    if h.n != spectrum.n:
        raise DegreeMismatch(f"map dimension {h.n} does not match n={spectrum.n}")
    if h.q < 2:
        raise DegreeOutOfRange(f"operator is defined for degree >= 2, got {h.q}")
    T_jet = PolyJet.from_linear(spectrum.T, 1)
    right = compose_truncated(h, T_jet, h.q, prune=False)
    left_terms: dict[TermKey, complex] = {}
    for (index, comp), coeff in h.terms.items():
        for i in range(spectrum.n):
            entry = spectrum.T[i, comp]
            if entry != 0:
                key = (index, i)
                left_terms[key] = left_terms.get(key, 0j) + entry * coeff
    diff = right - PolyJet(h.n, h.q, left_terms)
    return HomogeneousPart(h.n, h.q, diff.terms)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Matrix of the degree-``q`` operator in the ordered monomial basis."""

    q: int
    ordering: BasisOrdering
    entries: np.ndarray
    diag: np.ndarray  # the exact products l^I - l_j, position by position

    def apply(self, h: HomogeneousPart) -> HomogeneousPart:
        vec = coefficient_vector(h, self.ordering)
        return vector_to_part(self.entries @ vec, self.ordering)


def coefficient_vector(h: HomogeneousPart, ordering: BasisOrdering) -> np.ndarray:
    vec = np.zeros(len(ordering), dtype=complex)
    for key, coeff in h.terms.items():
        vec[ordering.rank[key]] = coeff
    return vec


def vector_to_part(vec: np.ndarray, ordering: BasisOrdering) -> HomogeneousPart:
    terms = {ordering.pairs[r]: vec[r] for r in range(len(ordering)) if vec[r] != 0}
    return HomogeneousPart(ordering.n, ordering.q, terms)


def build_matrix(spectrum: SpectrumData, q: int) -> OperatorMatrix:
    """Assemble the operator matrix column by column.

    Columns are expanded directly from cached powers of the linear forms
    ``(Tz)_t``, independently of :func:`apply_M`, so the two routes
    cross-check each other.  Every off-diagonal contribution lands at a
    strictly smaller rank, which makes the matrix upper triangular with
    exact structural zeros below the diagonal.
    """
    if q < 2:
        raise DegreeOutOfRange(f"operator matrices start at degree 2, got {q}")
    n = spectrum.n
    ordering = basis_ordering(n, q)
    dim = len(ordering)
    entries = np.zeros((dim, dim), dtype=complex)
    diag = np.zeros(dim, dtype=complex)

    one: dict[MultiIndex, complex] = {(0,) * n: 1.0 + 0j}
    linear_forms = []
    for t in range(n):
        form = {}
        for k in range(t, n):
            if spectrum.T[t, k] != 0:
                form[tuple(1 if i == k else 0 for i in range(n))] = complex(spectrum.T[t, k])
        linear_forms.append(form)
    power_cache: list[dict[int, dict]] = [{0: one} for _ in range(n)]

    def form_power(t: int, e: int):
        cache = power_cache[t]
        if e not in cache:
            top = max(m for m in cache if m <= e)
            acc = cache[top]
            for m in range(top + 1, e + 1):
                nxt: dict[MultiIndex, complex] = {}
                for ia, ca in acc.items():
                    for ib, cb in linear_forms[t].items():
                        key = tuple(x + y for x, y in zip(ia, ib))
                        nxt[key] = nxt.get(key, 0j) + ca * cb
                cache[m] = nxt
                acc = nxt
        return cache[e]

    for col, (index, comp) in enumerate(ordering.pairs):
        # (Tz)^I, expanded as a product of cached linear-form powers.
        acc = one
        for t, e in enumerate(index):
            if e == 0:
                continue
            factor = form_power(t, e)
            nxt = {}
            for ia, ca in acc.items():
                for ib, cb in factor.items():
                    key = tuple(x + y for x, y in zip(ia, ib))
                    nxt[key] = nxt.get(key, 0j) + ca * cb
            acc = nxt
            if not acc:
                break
        for mono, value in acc.items():
            entries[ordering.rank[(mono, comp)], col] += value
        # minus T o (z^I e_comp): same multi-index, components above comp.
        for i in range(comp + 1):
            if spectrum.T[i, comp] != 0:
                entries[ordering.rank[(index, i)], col] -= spectrum.T[i, comp]
        diag[col] = np.prod(spectrum.diag ** np.array(index)) - spectrum.diag[comp]
    return OperatorMatrix(q=q, ordering=ordering, entries=entries, diag=diag)


@dataclass(frozen=True)
class SplitResult:
    """Decomposition ``H = resonant + M(eliminated)`` of a homogeneous part."""

    resonant: HomogeneousPart
    eliminated: HomogeneousPart
    divisors: tuple[tuple[TermKey, float], ...]
    resonant_positions: tuple[TermKey, ...]
    warnings: tuple[str, ...]

    @property
    def divisor_min(self) -> float:
        nonres = [d for _, d in self.divisors if d > 0]
        return min(nonres) if nonres else float("inf")


def split_homogeneous(spectrum: SpectrumData, H: HomogeneousPart,
                      res_tol: float = DEFAULT_RES_TOL,
                      sr_tol: float = DEFAULT_SR_TOL) -> SplitResult:
    """Split ``H`` into a resonant part plus an operator image.

    Back-substitution walks the ordered basis from the largest rank down;
    non-resonant positions divide the residual by the diagonal and subtract
    the corresponding column, resonant positions move the residual into the
    kept part.  The kept part is supported on resonant positions only, the
    minimal (classical) choice.
    """
    if H.n != spectrum.n:
        raise DegreeMismatch(f"map dimension {H.n} does not match n={spectrum.n}")
    matrix = build_matrix(spectrum, H.q)
    ordering = matrix.ordering
    residual = coefficient_vector(H, ordering)
    kept = np.zeros(len(ordering), dtype=complex)
    removed = np.zeros(len(ordering), dtype=complex)
    divisors = []
    resonant_positions = []
    warnings = []
    for r in range(len(ordering) - 1, -1, -1):
        index, comp = ordering.pairs[r]
        divisor = abs(matrix.diag[r])
        scale = abs(spectrum.diag[comp])
        divisors.append(((index, comp), float(divisor)))
        if divisor <= res_tol * scale:
            if not is_subresonant_monomial(index, comp, spectrum, sr_tol):
                raise IllConditionedResonance(
                    f"divisor {divisor:.3g} at {(index, comp)} is resonantly small "
                    "but the position is not sub-resonant; res_tol and the "
                    "log-space tolerance are inconsistent for this spectrum")
            resonant_positions.append((index, comp))
            kept[r] = residual[r]
            residual[r] = 0.0
            continue
        if divisor <= SMALL_DIVISOR_REL * scale:
            warnings.append(
                f"small divisor {divisor:.3g} at position {(index, comp)}")
        if residual[r] != 0:
            removed[r] = residual[r] / matrix.entries[r, r]
            residual -= removed[r] * matrix.entries[:, r]
            residual[r] = 0.0
    return SplitResult(
        resonant=vector_to_part(kept, ordering),
        eliminated=vector_to_part(removed, ordering),
        divisors=tuple(reversed(divisors)),
        resonant_positions=tuple(reversed(resonant_positions)),
        warnings=tuple(warnings),
    )


def resonant_positions(spectrum: SpectrumData, q: int,
                       res_tol: float = DEFAULT_RES_TOL) -> tuple[TermKey, ...]:
    """Basis positions of degree ``q`` with ``|l^I - l_j| <= res_tol |l_j|``."""
    out = []
    for index in multi_indices(spectrum.n, q):
        lam_I = np.prod(spectrum.diag ** np.array(index))
        for comp in range(spectrum.n):
            if abs(lam_I - spectrum.diag[comp]) <= res_tol * abs(spectrum.diag[comp]):
                out.append((index, comp))
    out.sort(key=term_sort_key)
    return tuple(out)
