import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spectrum
from srnf.errors import DegreeMismatch
from srnf.homological import (
    apply_M,
    basis_dimension,
    basis_ordering,
    build_matrix,
    order_compare,
    resonant_positions,
    split_homogeneous,
)
from srnf.linalg import analyze_spectrum
from srnf.polymap import HomogeneousPart, multi_indices
from srnf.subresonance import (
    SubResonantMap,
    certify_subresonant,
    enumerate_subresonant_basis,
    is_subresonant_monomial,
)

QUARTER_HALF = analyze_spectrum(np.diag([0.25, 0.5]).astype(complex))


def part(n, q, terms):
    return HomogeneousPart(n, q, terms)


class TestOrderCompare:
    def test_later_variable_dominates(self):
        assert order_compare(((0, 2), 0), ((2, 0), 0)) == -1

    def test_component_tiebreak(self):
        assert order_compare(((1, 1), 0), ((1, 1), 1)) == -1

    def test_reflexive(self):
        assert order_compare(((1, 1), 0), ((1, 1), 0)) == 0

    def test_degree_mismatch(self):
        with pytest.raises(DegreeMismatch):
            order_compare(((1, 0), 0), ((1, 1), 0))

    def test_matches_basis_ordering(self):
        ordering = basis_ordering(2, 2)
        pairs = ordering.pairs
        assert pairs == (((0, 2), 0), ((0, 2), 1), ((1, 1), 0), ((1, 1), 1),
                         ((2, 0), 0), ((2, 0), 1))
        for a in range(len(pairs)):
            for b in range(len(pairs)):
                expected = -1 if a < b else (0 if a == b else 1)
                assert order_compare(pairs[a], pairs[b]) == expected


class TestApplyM:
    def test_resonant_kernel_element(self):
        # (l2^2 - l1) = 0 for l = (1/4, 1/2)
        out = apply_M(QUARTER_HALF, part(2, 2, {((0, 2), 0): 1.0}))
        assert out.terms == {}

    def test_nonresonant_diagonal_value(self):
        out = apply_M(QUARTER_HALF, part(2, 2, {((2, 0), 1): 1.0}))
        assert out.terms == {((2, 0), 1): pytest.approx(1 / 16 - 1 / 2)}

    def test_jordan_coupling_cancels(self):
        # with T = [[1/4, 1], [0, 1/2]] both summands give z2^2/4 e1
        T = np.array([[0.25, 1.0], [0.0, 0.5]], dtype=complex)
        s = analyze_spectrum(T)
        out = apply_M(s, part(2, 2, {((0, 2), 0): 1.0}))
        assert out.terms == {}


class TestBuildMatrix:
    def test_diagonal_spectrum_is_diagonal(self):
        m = build_matrix(QUARTER_HALF, 2)
        off = m.entries - np.diag(np.diag(m.entries))
        assert np.count_nonzero(off) == 0
        assert np.allclose(np.diag(m.entries), m.diag, atol=1e-15)

    def test_hand_entries(self):
        m = build_matrix(QUARTER_HALF, 2)
        r1 = m.ordering.rank[((0, 2), 0)]
        r2 = m.ordering.rank[((2, 0), 1)]
        assert m.entries[r1, r1] == 0
        assert m.entries[r2, r2] == pytest.approx(-7 / 16)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3), st.integers(2, 6))
    def test_triangular_with_diagonal_law(self, seed, n, q):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        m = build_matrix(s, q)
        dim = basis_dimension(n, q)
        assert m.entries.shape == (dim, dim)
        # exact structural zeros below the diagonal
        assert np.count_nonzero(np.tril(m.entries, -1)) == 0
        for r, (index, comp) in enumerate(m.ordering.pairs):
            lam_I = np.prod(s.diag ** np.array(index))
            assert abs(m.entries[r, r] - (lam_I - s.diag[comp])) < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3), st.integers(2, 4))
    def test_matrix_action_matches_operator(self, seed, n, q):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        terms = {}
        for index in multi_indices(n, q):
            for j in range(n):
                if rng.random() < 0.5:
                    terms[(index, j)] = complex(rng.normal(), rng.normal())
        h = part(n, q, terms)
        m = build_matrix(s, q)
        via_matrix = m.apply(h)
        via_operator = apply_M(s, h)
        assert via_matrix.max_coeff_diff(via_operator) < 1e-12


class TestStability:
    """The operator preserves sub-resonance in both directions."""

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_subresonant_input_gives_subresonant_image(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        for q in range(2, s.degree_bound + 1):
            basis = enumerate_subresonant_basis(s, q)
            if not basis:
                continue
            terms = {key: complex(rng.normal(), rng.normal())
                     for key in basis if rng.random() < 0.8}
            if not terms:
                terms = {basis[0]: 1.0 + 0j}
            image = apply_M(s, part(n, q, terms))
            assert isinstance(certify_subresonant(image, s), SubResonantMap)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_non_subresonant_input_gives_non_subresonant_image(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        q = int(rng.integers(2, 5))
        bad = [(index, j) for index in multi_indices(n, q) for j in range(n)
               if not is_subresonant_monomial(index, j, s)
               and float(np.dot(index, s.log_moduli)) < s.log_moduli[j] - 0.05]
        if not bad:
            return
        terms = {bad[int(rng.integers(len(bad)))]: complex(0.5 + rng.random(), rng.normal())}
        for index in multi_indices(n, q):  # mix in whatever else
            for j in range(n):
                if rng.random() < 0.3 and (
                        is_subresonant_monomial(index, j, s)
                        or float(np.dot(index, s.log_moduli)) < s.log_moduli[j] - 0.05):
                    terms.setdefault((index, j), complex(rng.normal(), rng.normal()))
        image = apply_M(s, part(n, q, terms))
        assert not isinstance(certify_subresonant(image, s), SubResonantMap)


class TestSplit:
    def test_hand_example(self):
        H = part(2, 2, {((1, 1), 0): 1.0, ((0, 2), 0): 1.0, ((2, 0), 1): 1.0})
        split = split_homogeneous(QUARTER_HALF, H)
        assert split.resonant.terms == {((0, 2), 0): 1.0}
        assert split.eliminated.coefficient((1, 1), 0) == pytest.approx(-8.0)
        assert split.eliminated.coefficient((2, 0), 1) == pytest.approx(-16 / 7)
        recomposed = split.resonant + apply_M(QUARTER_HALF, split.eliminated)
        assert recomposed.max_coeff_diff(H) < 1e-10

    def test_purely_resonant_input(self):
        H = part(2, 2, {((0, 2), 0): 3.5})
        split = split_homogeneous(QUARTER_HALF, H)
        assert split.resonant == H
        assert split.eliminated.terms == {}

    def test_no_resonant_support(self):
        H = part(2, 2, {((1, 1), 0): 2.0, ((1, 1), 1): -1.0})
        split = split_homogeneous(QUARTER_HALF, H)
        assert split.resonant.terms == {}
        image = apply_M(QUARTER_HALF, split.eliminated)
        assert image.max_coeff_diff(H) < 1e-10

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3), st.integers(2, 4))
    def test_contract_on_random_parts(self, seed, n, q):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        terms = {}
        for index in multi_indices(n, q):
            for j in range(n):
                if rng.random() < 0.6:
                    terms[(index, j)] = complex(rng.normal(), rng.normal())
        H = part(n, q, terms)
        split = split_homogeneous(s, H)
        recomposed = split.resonant + apply_M(s, split.eliminated)
        scale = max(1.0, H.max_abs_coeff())
        assert recomposed.max_coeff_diff(H) < 1e-10 * scale
        assert isinstance(certify_subresonant(split.resonant, s), SubResonantMap)
        # kept support is resonant, removed part vanishes there
        res = set(resonant_positions(s, q))
        assert set(split.resonant.terms) <= res
        assert not (set(split.eliminated.terms) & res)


class TestRankIdentity:
    """Sub-resonant basis plus operator image spans every degree."""

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_span(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        for q in range(2, s.c0 + 2):
            m = build_matrix(s, q)
            dim = basis_dimension(n, q)
            columns = [m.entries]
            for key in enumerate_subresonant_basis(s, q):
                e = np.zeros((dim, 1), dtype=complex)
                e[m.ordering.rank[key], 0] = 1.0
                columns.append(e)
            stacked = np.hstack(columns)
            assert np.linalg.matrix_rank(stacked, tol=1e-10) == dim
