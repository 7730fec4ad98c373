"""Iterative polynomial normal form of a contracting germ.

The pipeline conjugates the germ degree by degree with near-identity jets
``id + f_q``, where ``f_q`` solves the homological equation for the
non-resonant part of the degree-``q`` coefficients.  After degree
``c0 + 1`` every remaining tail term is absorbed by the straightening limit
``z -> lim_p P^{-(p)}(F^{(p)}(z))``, so the output normal form ``P`` is a
polynomial with resonant (hence sub-resonant) nonlinear support, together
with the composite conjugating jet and residual diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import (
    DegreeOutOfRange,
    DimensionMismatch,
    NoConvergence,
    ValidationError,
)
from .homological import SplitResult, split_homogeneous
from .linalg import (
    SpectrumData,
    analyze_spectrum,
    rescale_nilpotent,
    require_matrix,
    triangularize,
)
from .polymap import (
    HomogeneousPart,
    PolyJet,
    compose_truncated,
    homogeneous_part,
    jet_inverse,
    linear_conjugate,
)
from .subresonance import SubResonantMap, _certify_or_raise, sr_inverse

COORDINATE_FRAMES = ("original", "adapted")


@dataclass(frozen=True)
class GermInput:
    """A germ fixing the origin, with its declared coordinate frame."""

    jet: PolyJet
    coordinates: str = "adapted"

    def __post_init__(self):
        if self.coordinates not in COORDINATE_FRAMES:
            raise ValidationError(
                f"coordinates must be one of {COORDINATE_FRAMES}, got {self.coordinates!r}")

    @property
    def n(self) -> int:
        return self.jet.n

    @property
    def input_degree(self) -> int:
        return self.jet.degree


@dataclass(frozen=True)
class StepRecord:
    """One degree of the elimination: what was kept and what was removed."""

    q: int
    resonant: HomogeneousPart
    eliminated: HomogeneousPart
    divisor_min: float
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class ResidualReport:
    coefficient_max: float
    pointwise_max: float
    pointwise_mean: float
    sample_radius: float
    sample_count: int


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    spectrum: SpectrumData
    normal_form: SubResonantMap
    steps: tuple[StepRecord, ...]
    phi: PolyJet
    residuals: ResidualReport
    basis_change: np.ndarray
    germ_adapted: PolyJet
    contraction_radius: float
    contraction_ratio: float
    trunc_degree: int
    warnings: tuple[str, ...]


def ingest(germ: GermInput, cfg: RunConfig = RunConfig()):
    """Validate a germ and move it to adapted coordinates.

    Returns ``(spectrum, adapted_jet, Q)`` where ``Q`` is the unitary basis
    change (identity when the germ was already adapted).
    """
    linear = require_matrix(germ.jet.linear_part())
    if germ.coordinates == "adapted":
        # must already be upper triangular with ordered moduli
        spectrum = analyze_spectrum(linear, cfg.block_tol)
        return spectrum, germ.jet, np.eye(germ.n, dtype=complex)
    Q, T = triangularize(linear)
    spectrum = analyze_spectrum(T, cfg.block_tol)
    adapted = linear_conjugate(germ.jet, Q, germ.jet.degree)
    # replace the numerically conjugated linear part with the exact T
    terms = {k: c for k, c in adapted.terms.items() if sum(k[0]) > 1}
    adapted = PolyJet(germ.n, adapted.degree, terms) + PolyJet.from_linear(T, 1)
    return spectrum.with_basis_change(Q), adapted, Q


def contraction_ball(spectrum: SpectrumData, jet: PolyJet) -> tuple[float, float]:
    """Radius and one-step norm ratio certified for orbits of the germ.

    Bounds come from the nilpotent-rescaled frame: with strictly-upper
    entries below ``eps`` and nonlinear coefficient mass ``C`` there,
    points with ``||z|| <= r0`` satisfy ``||F(z)|| <= ||z|| (1+|l_n|)/2``.
    The radius is pulled back conservatively to the adapted frame.
    """
    lam_max = float(spectrum.moduli[-1])
    eps_request = min(0.05, (1.0 - lam_max) / 8.0)
    S, scaled_T = rescale_nilpotent(spectrum.T, eps_request)
    delta = float(np.real(S[0, 0]))
    eps_achieved = float(np.max(np.abs(np.triu(scaled_T, 1)))) if spectrum.n > 1 else 0.0
    # Nonlinear coefficient mass in the rescaled frame: the coefficient of
    # z^I e_j picks up the factor delta^(w(I) - (j+1)), w(I) = sum (k+1) i_k.
    mass = np.zeros(spectrum.n)
    for (index, comp), coeff in jet.terms.items():
        d = sum(index)
        if d < 2:
            continue
        weight = sum((k + 1) * e for k, e in enumerate(index))
        mass[comp] += abs(coeff) * delta ** (weight - (comp + 1))
    C = float(np.linalg.norm(mass))
    numerator = 1.0 - lam_max - 2.0 * eps_achieved
    if numerator <= 0:
        return 0.0, 1.0
    if C <= 1e-15:
        r_scaled = 1.0
    else:
        r_scaled = min(1.0, numerator / (2.0 * C))
    radius = r_scaled * delta ** spectrum.n
    ratio = (1.0 + lam_max) / 2.0
    return radius, ratio


def conjugate_step(F: PolyJet, f_q: HomogeneousPart, degree: int, *,
                   prune: bool = True) -> PolyJet:
    """Conjugate ``F`` by ``id + f_q`` and truncate at ``degree``.

    Degrees below ``q`` pass through unchanged and the degree-``q`` part
    becomes ``H_q - (f_q o L - L o f_q)``.
    """
    if F.n != f_q.n:
        raise DimensionMismatch("germ and correction have different dimensions")
    if f_q.q < 2:
        raise DegreeOutOfRange("conjugation corrections start at degree 2")
    if not f_q.terms:
        return F.truncated(degree)
    psi = PolyJet.identity(F.n, degree) + f_q
    psi_inv = jet_inverse(psi, degree)
    return compose_truncated(psi_inv, compose_truncated(F, psi, degree, prune=prune),
                             degree, prune=prune)


def poincare_dulac(germ: GermInput, cfg: RunConfig = RunConfig()) -> NormalFormResult:
    """Compute the polynomial normal form and the conjugating jet.

    Loops over degrees ``2..D``: split the degree's coefficients into
    resonant plus removable, conjugate away the removable part, accumulate
    the conjugator.  ``D`` defaults to ``c0 + 1``; larger values refine the
    conjugator but add no resonant terms.
    """
    spectrum, adapted_full, Q = ingest(germ, cfg)
    D = cfg.trunc_degree if cfg.trunc_degree is not None else spectrum.c0 + 1
    if D < spectrum.c0 + 1:
        raise ValidationError(
            f"trunc_degree {D} is below c0+1 = {spectrum.c0 + 1} for this spectrum")

    current = adapted_full.truncated(D) if adapted_full.degree > D \
        else PolyJet(adapted_full.n, D, adapted_full.terms)
    phi = PolyJet.identity(germ.n, D)
    steps: list[StepRecord] = []
    warnings: list[str] = []
    for q in range(2, D + 1):
        H_q = homogeneous_part(current, q)
        split: SplitResult = split_homogeneous(spectrum, H_q, cfg.res_tol, cfg.sr_tol)
        steps.append(StepRecord(
            q=q,
            resonant=split.resonant,
            eliminated=split.eliminated,
            divisor_min=split.divisor_min,
            warnings=split.warnings,
        ))
        warnings.extend(split.warnings)
        if split.eliminated.terms:
            current = conjugate_step(current, split.eliminated, D, prune=cfg.prune)
            phi = compose_truncated(phi, PolyJet.identity(germ.n, D) + split.eliminated,
                                    D, prune=cfg.prune)

    normal_jet = PolyJet.from_linear(spectrum.T, max(1, spectrum.degree_bound))
    for record in steps:
        if record.resonant.terms:
            normal_jet = normal_jet + record.resonant
    normal_form = _certify_or_raise(normal_jet, spectrum, cfg.sr_tol,
                                    "normal form output")

    radius, ratio = contraction_ball(spectrum, adapted_full)
    residuals = _residual_report(adapted_full, phi, normal_form.jet, D, radius, cfg)
    return NormalFormResult(
        spectrum=spectrum,
        normal_form=normal_form,
        steps=tuple(steps),
        phi=phi,
        residuals=residuals,
        basis_change=Q,
        germ_adapted=adapted_full,
        contraction_radius=radius,
        contraction_ratio=ratio,
        trunc_degree=D,
        warnings=tuple(warnings),
    )


def _residual_report(adapted_full: PolyJet, phi: PolyJet, P_jet: PolyJet,
                     D: int, radius: float, cfg: RunConfig) -> ResidualReport:
    coeff_res = conjugacy_coefficient_residual(adapted_full, phi, P_jet, D)
    rng = np.random.default_rng(cfg.seed)
    r = min(cfg.sample_radius, 0.5 * radius) if radius > 0 else cfg.sample_radius
    values = []
    for _ in range(cfg.sample_count):
        z = _random_point(rng, adapted_full.n, r)
        values.append(pointwise_conjugacy_residual(adapted_full, phi, P_jet, z))
    return ResidualReport(
        coefficient_max=coeff_res,
        pointwise_max=max(values) if values else 0.0,
        pointwise_mean=float(np.mean(values)) if values else 0.0,
        sample_radius=r,
        sample_count=len(values),
    )


def conjugacy_coefficient_residual(F: PolyJet, phi: PolyJet, P_jet: PolyJet,
                                   degree: int) -> float:
    """Largest coefficient gap between ``F o phi`` and ``phi o P`` through ``degree``."""
    left = compose_truncated(F, phi, degree, prune=False)
    right = compose_truncated(phi, P_jet, degree, prune=False)
    return left.max_coeff_diff(right)


def pointwise_conjugacy_residual(F: PolyJet, phi: PolyJet, P_jet: PolyJet, z) -> float:
    """``||F(phi(z)) - phi(P(z))||`` with all maps evaluated as polynomials."""
    z = np.asarray(z, dtype=complex)
    return float(np.linalg.norm(F.evaluate(phi.evaluate(z)) - phi.evaluate(P_jet.evaluate(z))))


def _random_point(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    direction = rng.normal(size=n) + 1j * rng.normal(size=n)
    norm = np.linalg.norm(direction)
    if norm == 0:
        direction = np.ones(n, dtype=complex)
        norm = np.linalg.norm(direction)
    return radius * direction / norm


def phi_numeric(F: PolyJet, P: SubResonantMap, z, *, p_max: int = 60,
                cauchy_tol: float = 1e-12) -> np.ndarray:
    """Straightening value ``lim_p P^{-(p)}(F^{(p)}(z))``.

    The limit ``phi`` sends orbits of ``F`` to orbits of ``P``:
    ``phi(F(z)) = P(phi(z))``, ``phi(0) = 0``, ``phi'(0) = id``.  Requires
    ``F`` and ``P`` to agree through degree ``c0`` and ``z`` inside the
    contraction ball; iterates until the update gap falls below
    ``cauchy_tol * max(1, ||z||)``.
    """
    value, _, gap = _straightening_iterate(F, P, np.asarray(z, dtype=complex),
                                           p_max, cauchy_tol)
    if gap is None:
        return value
    raise NoConvergence(
        f"straightening did not stabilize in {p_max} iterations (last gap {gap:.3g})",
        last_gap=gap, iterations=p_max)


def _straightening_iterate(F: PolyJet, P: SubResonantMap, z: np.ndarray,
                           p_max: int, cauchy_tol: float, *, pullback: PolyJet = None):
    """Shared iteration for the straightening limit.

    With ``pullback`` given, computes ``lim_p P^{-(p)}(pullback(F^{(p)}(z)))``,
    the straightening of ``pullback^{-1} o F o pullback``-conjugated germs
    evaluated through the polynomial stage.
    """
    if F.n != P.jet.n or z.shape != (F.n,):
        raise DimensionMismatch("dimensions of germ, normal form and point differ")
    tol = cauchy_tol * max(1.0, float(np.linalg.norm(z)))
    P_inv = sr_inverse(P).jet
    forward = z
    previous = None
    last_gap = None
    for p in range(p_max + 1):
        w = pullback.evaluate(forward) if pullback is not None else forward
        for _ in range(p):
            w = P_inv.evaluate(w)
        if previous is not None:
            last_gap = float(np.linalg.norm(w - previous))
            if last_gap <= tol:
                return w, p, None
        previous = w
        forward = F.evaluate(forward)
    return previous, p_max, last_gap if last_gap is not None else float("inf")


@dataclass(frozen=True)
class ConjugacyReport:
    """Coefficient- and point-level evidence for one computed conjugacy."""

    coefficient_max: float
    polynomial_pointwise: tuple[float, ...]
    straightened_pointwise: tuple[float, ...]
    sample_points: tuple[tuple[complex, ...], ...]
    amplification_estimate: float

    @property
    def polynomial_max(self) -> float:
        return max(self.polynomial_pointwise, default=0.0)

    @property
    def straightened_max(self) -> float:
        return max(self.straightened_pointwise, default=0.0)


def verify_conjugacy(germ: GermInput, result: NormalFormResult,
                     samples=None, cfg: RunConfig = RunConfig()) -> ConjugacyReport:
    """Check ``F o phi = phi o P`` in coefficients and at sample points.

    Coefficient check: compose both sides through the working degree and
    report the largest gap.  Point checks, in adapted coordinates: the
    polynomial-stage residual ``||F(phi(z)) - phi(P(z))||`` and the
    straightened residual ``||g(F(z)) - P(g(z))||`` where ``g`` composes the
    inverse of the polynomial stage with the numeric straightening limit.
    """
    spectrum = result.spectrum
    F = result.germ_adapted
    P = result.normal_form
    D = result.trunc_degree
    coeff = conjugacy_coefficient_residual(F.truncated(D) if F.degree > D else F,
                                           result.phi, P.jet, D)
    if samples is None:
        rng = np.random.default_rng(cfg.seed)
        radius = min(cfg.sample_radius, 0.5 * result.contraction_radius) \
            if result.contraction_radius > 0 else cfg.sample_radius
        samples = [_random_point(rng, F.n, radius) for _ in range(cfg.sample_count)]
    samples = [np.asarray(z, dtype=complex) for z in samples]

    poly_res = tuple(pointwise_conjugacy_residual(F, result.phi, P.jet, z)
                     for z in samples)

    phi_inv = jet_inverse(result.phi, D)
    straightened = []
    p_used = 0
    for z in samples:
        g_z, p1, gap1 = _straightening_iterate(F, P, z, cfg.p_max, cfg.cauchy_tol,
                                               pullback=phi_inv)
        g_Fz, p2, gap2 = _straightening_iterate(F, P, F.evaluate(z), cfg.p_max,
                                                cfg.cauchy_tol, pullback=phi_inv)
        if gap1 is not None or gap2 is not None:
            straightened.append(float("nan"))
            continue
        p_used = max(p_used, p1, p2)
        straightened.append(float(np.linalg.norm(g_Fz - P.jet.evaluate(g_z))))
    amplification = float(spectrum.moduli[0] ** (-p_used)) if p_used else 1.0
    return ConjugacyReport(
        coefficient_max=coeff,
        polynomial_pointwise=poly_res,
        straightened_pointwise=tuple(straightened),
        sample_points=tuple(tuple(z) for z in samples),
        amplification_estimate=amplification,
    )
