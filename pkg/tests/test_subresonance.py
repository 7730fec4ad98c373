import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spectrum, random_sr_map
from srnf.errors import SingularLinearPart, SpectrumMismatch
from srnf.linalg import analyze_spectrum
from srnf.polymap import PolyJet, multi_indices
from srnf.subresonance import (
    SubResonantMap,
    certify_subresonant,
    enumerate_subresonant_basis,
    is_linear_subresonant,
    is_subresonant_monomial,
    monomial_type,
    sr_compose,
    sr_inverse,
)

QUARTER_HALF = analyze_spectrum(np.diag([0.25, 0.5]).astype(complex))


def certified(jet, spectrum):
    out = certify_subresonant(jet, spectrum)
    assert isinstance(out, SubResonantMap), f"expected certification, got {out}"
    return out


class TestMonomialType:
    def test_singleton_blocks(self):
        assert monomial_type((0, 2), QUARTER_HALF) == (0, 2)

    def test_grouping(self):
        s = analyze_spectrum(np.diag([0.3, 0.3, 0.6]).astype(complex))
        assert s.blocks == ((0, 1), (2,))
        assert monomial_type((1, 1, 1), s) == (2, 1)

    def test_unit_vector(self):
        s = analyze_spectrum(np.diag([0.3, 0.3, 0.6]).astype(complex))
        for k in range(3):
            index = tuple(1 if i == k else 0 for i in range(3))
            expected = tuple(1 if b == s.block_of[k] else 0 for b in range(len(s.blocks)))
            assert monomial_type(index, s) == expected


class TestMonomialPredicate:
    def test_resonant_equality_case(self):
        # ln(1/4) = 2 ln(1/2): equality must classify as sub-resonant
        assert is_subresonant_monomial((0, 2), 0, QUARTER_HALF)

    def test_reverse_fails(self):
        assert not is_subresonant_monomial((1, 0), 1, QUARTER_HALF)

    def test_diagonal_linear_always_passes(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            s = random_spectrum(rng, 3)
            for j in range(3):
                index = tuple(1 if i == j else 0 for i in range(3))
                assert is_subresonant_monomial(index, j, s)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3), st.integers(1, 5))
    def test_equivalent_block_form(self, seed, n, degree):
        # grouping exponents by block changes nothing: moduli are
        # block-constant, so both weighted sums agree
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        for index in multi_indices(n, degree):
            profile = monomial_type(index, s)
            weight = sum(p * s.block_log_modulus(b) for b, p in enumerate(profile))
            for j in range(n):
                block_form = s.log_moduli[j] <= weight + 1e-9
                assert block_form == is_subresonant_monomial(index, j, s)


class TestEnumerate:
    def test_degree_one(self):
        basis = enumerate_subresonant_basis(QUARTER_HALF, 1)
        assert set(basis) == {((1, 0), 0), ((0, 1), 0), ((0, 1), 1)}

    def test_degree_two(self):
        assert enumerate_subresonant_basis(QUARTER_HALF, 2) == (((0, 2), 0),)

    def test_degree_three_empty(self):
        assert enumerate_subresonant_basis(QUARTER_HALF, 3) == ()

    def test_canonical_order(self):
        basis = enumerate_subresonant_basis(QUARTER_HALF, 1)
        assert basis == (((0, 1), 0), ((0, 1), 1), ((1, 0), 0))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_degree_bound_and_block_vanishing(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        for r in range(s.degree_bound + 1, s.degree_bound + 3):
            assert enumerate_subresonant_basis(s, r) == ()
        for r in range(1, s.c0 + 2):
            for index, comp in enumerate_subresonant_basis(s, r):
                for k, e in enumerate(index):
                    if e > 0:
                        assert s.block_of[k] >= s.block_of[comp]


class TestCertify:
    def test_linear_part_itself(self):
        jet = PolyJet.from_linear(QUARTER_HALF.T)
        assert isinstance(certify_subresonant(jet, QUARTER_HALF), SubResonantMap)

    def test_resonant_map(self):
        jet = PolyJet(2, 2, {((1, 0), 0): 0.25, ((0, 2), 0): 1.0, ((0, 1), 1): 0.5})
        assert isinstance(certify_subresonant(jet, QUARTER_HALF), SubResonantMap)

    def test_offender_reported(self):
        jet = PolyJet(2, 2, {((1, 0), 0): 0.25, ((0, 1), 1): 0.5, ((2, 0), 1): 1.0})
        outcome = certify_subresonant(jet, QUARTER_HALF)
        assert outcome == [((2, 0), 1)]


class TestCompose:
    def test_identity(self):
        h = certified(PolyJet(2, 2, {((1, 0), 0): 0.25, ((0, 2), 0): 1.0,
                                     ((0, 1), 1): 0.5}), QUARTER_HALF)
        ident = certified(PolyJet.identity(2), QUARTER_HALF)
        assert sr_compose(h, ident) == h
        assert sr_compose(ident, h) == h

    def test_hand_self_composition(self):
        # h o h for h = (z1/4 + z2^2, z2/2) is (z1/16 + z2^2/2, z2/4)
        h = certified(PolyJet(2, 2, {((1, 0), 0): 0.25, ((0, 2), 0): 1.0,
                                     ((0, 1), 1): 0.5}), QUARTER_HALF)
        out = sr_compose(h, h)
        assert out.jet.coefficient((1, 0), 0) == pytest.approx(1 / 16)
        assert out.jet.coefficient((0, 2), 0) == pytest.approx(1 / 2)
        assert out.jet.coefficient((0, 1), 1) == pytest.approx(1 / 4)
        assert len(out.jet.terms) == 3

    def test_spectrum_mismatch(self):
        other = analyze_spectrum(np.diag([0.2, 0.5]).astype(complex))
        a = certified(PolyJet.identity(2), QUARTER_HALF)
        b = certified(PolyJet.identity(2), other)
        with pytest.raises(SpectrumMismatch):
            sr_compose(a, b)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_closure(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        F = certified(random_sr_map(rng, s), s)
        G = certified(random_sr_map(rng, s), s)
        out = sr_compose(F, G)  # raises CertificationFailure on any violation
        assert out.jet.max_degree() <= s.degree_bound


class TestInverse:
    def test_identity(self):
        ident = certified(PolyJet.identity(2), QUARTER_HALF)
        assert sr_inverse(ident) == ident

    def test_hand_example(self):
        # inverse of (z1/4 + z2^2, z2/2) is (4 w1 - 16 w2^2, 2 w2)
        h = certified(PolyJet(2, 2, {((1, 0), 0): 0.25, ((0, 2), 0): 1.0,
                                     ((0, 1), 1): 0.5}), QUARTER_HALF)
        inv = sr_inverse(h)
        assert inv.jet.coefficient((1, 0), 0) == pytest.approx(4.0)
        assert inv.jet.coefficient((0, 2), 0) == pytest.approx(-16.0)
        assert inv.jet.coefficient((0, 1), 1) == pytest.approx(2.0)
        ident = PolyJet.identity(2)
        assert sr_compose(h, inv).jet.max_coeff_diff(ident) < 1e-12
        assert sr_compose(inv, h).jet.max_coeff_diff(ident) < 1e-12

    def test_linear_diagonal(self):
        L = certified(PolyJet.from_linear(QUARTER_HALF.T), QUARTER_HALF)
        inv = sr_inverse(L)
        assert np.allclose(inv.linear_part(), np.diag([4.0, 2.0]), atol=1e-14)

    def test_singular_linear_part(self):
        jet = PolyJet(2, 2, {((1, 0), 0): 1.0, ((0, 2), 0): 1.0})
        h = SubResonantMap(jet=jet, spectrum=QUARTER_HALF)
        with pytest.raises(SingularLinearPart):
            sr_inverse(h)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_group_axioms(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        F = certified(random_sr_map(rng, s), s)
        inv = sr_inverse(F)
        ident = PolyJet.identity(n)
        assert sr_compose(F, inv).jet.max_coeff_diff(ident) < 1e-10
        assert sr_compose(inv, F).jet.max_coeff_diff(ident) < 1e-10
        assert inv.jet.max_degree() <= s.degree_bound
        assert sr_inverse(inv).jet.max_coeff_diff(F.jet) < 1e-9


class TestLinearFlag:
    def test_diagonal_true(self):
        assert is_linear_subresonant(np.diag([3.0, 7.0]), QUARTER_HALF)

    def test_lower_entry_false(self):
        A = np.array([[0.25, 0.0], [1.0, 0.5]], dtype=complex)
        assert not is_linear_subresonant(A, QUARTER_HALF)

    def test_upper_entry_true(self):
        A = np.array([[0.25, 1.0], [0.0, 0.5]], dtype=complex)
        assert is_linear_subresonant(A, QUARTER_HALF)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 3))
    def test_agrees_with_certification(self, seed, n):
        rng = np.random.default_rng(seed)
        s = random_spectrum(rng, n)
        A = np.zeros((n, n), dtype=complex)
        for j in range(n):
            for k in range(n):
                if rng.random() < 0.6:
                    A[j, k] = rng.normal() + 1j * rng.normal()
        jet = PolyJet.from_linear(A, 1)
        outcome = certify_subresonant(jet, s)
        assert is_linear_subresonant(A, s) == isinstance(outcome, SubResonantMap)
