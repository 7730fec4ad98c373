"""Run configuration shared by the library pipeline and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class RunConfig:
    """Tolerances and sampling controls.

    ``trunc_degree`` overrides the working truncation degree (default
    ``c0 + 1``, the smallest degree the straightening limit supports);
    raising it refines the conjugating jet without changing the normal form.
    """

    res_tol: float = 1e-9
    sr_tol: float = 1e-9
    block_tol: float = 1e-9
    cauchy_tol: float = 1e-12
    trunc_degree: int | None = None
    p_max: int = 60
    prune: bool = True
    sample_count: int = 20
    sample_radius: float = 0.05
    seed: int = 0

    def __post_init__(self):
        for name in ("res_tol", "sr_tol", "block_tol", "cauchy_tol", "sample_radius"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        if self.trunc_degree is not None and self.trunc_degree < 2:
            raise ValidationError("trunc_degree must be at least 2")
        if self.p_max < 1:
            raise ValidationError("p_max must be at least 1")
        if self.sample_count < 0:
            raise ValidationError("sample_count must be nonnegative")
