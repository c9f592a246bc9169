"""Scikit-learn compatible front end.

``SubspaceClassifier`` fits on the spanning vectors of a subspace, exposes
the class verdict as fitted attributes, and predicts separability of
density matrices over that subspace, so the machinery drops into sklearn
pipelines, ``clone`` and parameter search without adapters.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ._validation import check_density_array, check_dims, subspace_from_array
from .api import classify_subspace
from .errors import SupportMismatchError
from .linalg import DensityMatrix, DimensionProfile
from .separability import membership, min_pt_eigenvalue_all_cuts, is_ppt
from .tolerances import DEFAULT_TOL

__all__ = ["SubspaceClassifier"]


class SubspaceClassifier(BaseEstimator):
    """Classify a Hilbert subspace and predict separability over it.

    Parameters
    ----------
    dims : sequence of int
        Local Hilbert-space dimensions; their product is the expected
        feature count.
    cut : sequence of int or None
        Subsystems forming the left side of a bipartite cut.  ``None``
        selects the natural bipartition for two subsystems and full
        multipartite separability otherwise.
    rank_rel_tol, membership_tol, root_cluster_tol, psd_tol : float
        Thresholds for rank, membership and clustering decisions.
    seed : int
        Seed for the randomized steps of the product-state solver.

    Attributes
    ----------
    result_ : classification result with witnesses and description
    tag_ : str, the class tag
    dim_s_sep_ : int, dimension spanned by the product states
    description_ : executable description of the separable set

    Examples
    --------
    >>> import numpy as np
    >>> clf = SubspaceClassifier(dims=(2, 2))
    >>> clf.fit(np.eye(4)[[0, 3]])
    SubspaceClassifier(dims=(2, 2))
    >>> clf.tag_
    'BLM_2x2'
    """

    def __init__(
        self,
        dims=None,
        cut=None,
        rank_rel_tol=DEFAULT_TOL.rank_rel_tol,
        membership_tol=DEFAULT_TOL.membership_tol,
        root_cluster_tol=DEFAULT_TOL.root_cluster_tol,
        psd_tol=DEFAULT_TOL.psd_tol,
        seed=0,
    ):
        self.dims = dims
        self.cut = cut
        self.rank_rel_tol = rank_rel_tol
        self.membership_tol = membership_tol
        self.root_cluster_tol = root_cluster_tol
        self.psd_tol = psd_tol
        self.seed = seed

    def _tol(self):
        return DEFAULT_TOL.replace(
            rank_rel_tol=self.rank_rel_tol,
            membership_tol=self.membership_tol,
            root_cluster_tol=self.root_cluster_tol,
            psd_tol=self.psd_tol,
        )

    def fit(self, X, y=None):
        """Classify the subspace spanned by the rows of X.

        X holds 1 to 3 complex amplitude vectors of length ``prod(dims)``;
        they are orthonormalized internally.
        """
        dims = check_dims(self.dims)
        basis = subspace_from_array(X, dims)
        cut = None if self.cut is None else tuple(self.cut)
        result = classify_subspace(basis, cut, self._tol(), int(self.seed))
        self.n_features_in_ = basis.profile.total_dim
        self.basis_ = basis
        self.result_ = result
        self.tag_ = result.tag.value if hasattr(result.tag, "value") else result.tag
        self.dim_s_sep_ = result.dim_s_sep
        self.description_ = result.description
        self.product_states_ = np.stack(
            [p.amplitudes for p in _result_products(result)]
        ) if _result_products(result) else np.empty((0, self.n_features_in_), complex)
        return self

    def _check_fitted(self):
        if not hasattr(self, "result_"):
            raise NotFittedError("SubspaceClassifier must be fitted before predicting")

    def predict(self, X):
        """Separability of density matrices over the fitted subspace.

        X is an array of density matrices, shape (n, D, D) or (D, D).
        Returns a boolean array; states with support outside the fitted
        subspace are entangled relative to it and yield False.
        """
        self._check_fitted()
        arr = check_density_array(X, check_dims(self.dims))
        tol = self._tol()
        out = np.zeros(arr.shape[0], dtype=bool)
        profile = DimensionProfile(check_dims(self.dims))
        for i, mat in enumerate(arr):
            rho = DensityMatrix(mat, profile)
            try:
                verdict = membership(rho, self.description_, tol, carrier=self.basis_)
            except SupportMismatchError:
                out[i] = False
                continue
            out[i] = verdict.separable
        return out

    def score_samples(self, X):
        """Minimum partial-transpose eigenvalue per state (higher = more PPT).

        For multipartite profiles the minimum runs over every bipartite cut.
        """
        self._check_fitted()
        arr = check_density_array(X, check_dims(self.dims))
        tol = self._tol()
        profile = DimensionProfile(check_dims(self.dims))
        scores = np.empty(arr.shape[0])
        for i, mat in enumerate(arr):
            rho = DensityMatrix(mat, profile)
            if self.cut is not None or profile.n_subsystems == 2:
                scores[i] = is_ppt(rho, self.cut, tol)[1]
            else:
                scores[i] = min_pt_eigenvalue_all_cuts(rho, tol)
        return scores


def _result_products(result):
    witnesses = getattr(result, "witnesses", None)
    if witnesses is not None:
        return list(witnesses.spanning_products)
    return list(getattr(result, "products", ()))
