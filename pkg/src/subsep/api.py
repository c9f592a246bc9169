"""Top-level dispatch: classify subspaces or states over any profile."""

from __future__ import annotations

from typing import Sequence, Union

from .classify import ClassificationResult, classify_bipartite
from .linalg import DensityMatrix, SubspaceBasis, support_basis
from .multipartite import MultiClassResult, classify_multipartite_subspace
from .tolerances import DEFAULT_TOL, ToleranceConfig

__all__ = ["AnyClassification", "classify_subspace", "classify_state_support"]

AnyClassification = Union[ClassificationResult, MultiClassResult]


def classify_subspace(
    basis: SubspaceBasis,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> AnyClassification:
    """Classify a subspace of dimension 1 to 3.

    Bipartite profiles (or an explicit cut) use the 14-class bipartite
    taxonomy; multipartite profiles without a cut are classified for full
    separability.
    """
    if cut is not None or basis.profile.n_subsystems == 2:
        return classify_bipartite(basis, cut, tol, seed)
    return classify_multipartite_subspace(basis, tol, seed)


def classify_state_support(
    rho: DensityMatrix,
    cut: Sequence[int] | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
    seed: int = 0,
) -> tuple[SubspaceBasis, AnyClassification]:
    """Classify the support of a rank-<=3 density matrix."""
    basis = support_basis(rho, tol)
    return basis, classify_subspace(basis, cut, tol, seed)
