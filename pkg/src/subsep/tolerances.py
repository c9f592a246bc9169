"""Tolerance configuration for all rank / membership / clustering decisions.

Classification of a subspace is a discrete verdict computed from floating
point data, so every threshold is explicit and configurable.  Tolerances are
relative wherever a natural scale exists (largest singular value or
eigenvalue) and absolute otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds used by rank tests, membership tests and root clustering.

    rank_rel_tol
        Singular values below ``rank_rel_tol * sigma_max`` count as zero.
    membership_tol
        Absolute residual allowed when testing that a point satisfies a
        quadric, that a state lies in a subspace, or that a convex
        decomposition reproduces a state.
    root_cluster_tol
        Chordal (Fubini-Study) distance below which two projective roots
        are considered the same solution.
    psd_tol
        Eigenvalues above ``-psd_tol`` count as nonnegative.
    """

    rank_rel_tol: float = 1e-9
    membership_tol: float = 1e-8
    root_cluster_tol: float = 1e-6
    psd_tol: float = 1e-10

    def __post_init__(self) -> None:
        for name in ("rank_rel_tol", "membership_tol", "root_cluster_tol", "psd_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    def replace(self, **kwargs) -> "ToleranceConfig":
        data = {
            "rank_rel_tol": self.rank_rel_tol,
            "membership_tol": self.membership_tol,
            "root_cluster_tol": self.root_cluster_tol,
            "psd_tol": self.psd_tol,
        }
        data.update(kwargs)
        return ToleranceConfig(**data)


DEFAULT_TOL = ToleranceConfig()
