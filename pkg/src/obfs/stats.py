"""Labeled samples, per-subset sufficient statistics, and SPD log-determinants.

Statistics are accumulated once over the full feature set (per class and
pooled) with a single-pass Welford update, then sliced per subset.  That
keeps the cost independent of how many subsets get scored and makes the
restriction property (subset statistics equal the sub-blocks of full-set
statistics) hold exactly, by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal

import numpy as np

from .errors import InputError, NotPositiveDefiniteError
from .partitions import FeatureSet

Scope = Literal[0, 1, "pooled"]


class _RunningMoments:
    """Welford accumulator for mean vector and scatter matrix.

    Deterministic for a fixed row order.  The scatter update uses the
    symmetric rank-one form, so the covariance matrix is exactly symmetric
    entrywise.
    """

    def __init__(self, dim: int):
        self.count = 0
        self.mean = np.zeros(dim)
        self._scatter = np.zeros((dim, dim))

    def update(self, row: np.ndarray) -> None:
        self.count += 1
        delta = row - self.mean
        self.mean += delta / self.count
        self._scatter += np.outer(delta, delta) * ((self.count - 1) / self.count)

    def covariance(self) -> np.ndarray | None:
        if self.count < 2:
            return None
        return self._scatter / (self.count - 1)

    def snapshot(self) -> "MomentSummary":
        mean = self.mean.copy() if self.count >= 1 else None
        cov = self.covariance()
        if mean is not None:
            mean.flags.writeable = False
        if cov is not None:
            cov.flags.writeable = False
        return MomentSummary(self.count, mean, cov)


@dataclass(frozen=True)
class MomentSummary:
    """Count, mean, and unbiased covariance for one class or the pooled sample.

    ``mean`` is None when the count is 0; ``cov`` is None when the count is
    below 2 (the unbiased estimator is undefined and downstream scoring
    falls back to the prior scale alone).
    """

    count: int
    mean: np.ndarray | None
    cov: np.ndarray | None

    def restrict(self, positions: tuple[int, ...]) -> "MomentSummary":
        idx = list(positions)
        mean = None if self.mean is None else self.mean[idx]
        cov = None if self.cov is None else self.cov[np.ix_(idx, idx)]
        return MomentSummary(self.count, mean, cov)


@dataclass(frozen=True)
class SampleMoments:
    """Full-feature-set statistics for both classes and the pooled sample."""

    class0: MomentSummary
    class1: MomentSummary
    pooled: MomentSummary

    def scope(self, which: Scope) -> MomentSummary:
        if which == 0:
            return self.class0
        if which == 1:
            return self.class1
        if which == "pooled":
            return self.pooled
        raise InputError(f"unknown scope {which!r}; expected 0, 1, or 'pooled'")


class LabeledSample:
    """n rows of real feature vectors with binary class labels.

    Immutable after construction; the backing arrays are marked read-only
    so computed statistics can be shared across threads.
    """

    def __init__(
        self,
        features: np.ndarray,
        labels: np.ndarray,
        feature_names: tuple[str, ...] | None = None,
    ):
        features = np.ascontiguousarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2:
            raise InputError(f"features must be a 2-d array, got shape {features.shape}")
        if labels.shape != (features.shape[0],):
            raise InputError(
                f"labels shape {labels.shape} does not match {features.shape[0]} rows"
            )
        if features.size and not np.all(np.isfinite(features)):
            raise InputError("features must be finite")
        if labels.size and not np.all((labels == 0) | (labels == 1)):
            raise InputError("labels must be 0 or 1")
        if feature_names is not None:
            feature_names = tuple(feature_names)
            if len(feature_names) != features.shape[1]:
                raise InputError("feature_names length does not match feature count")
            if len(set(feature_names)) != len(feature_names):
                raise InputError("feature_names must be unique")
        features.flags.writeable = False
        labels.flags.writeable = False
        self.features = features
        self.labels = labels
        self.feature_names = feature_names

    @property
    def num_rows(self) -> int:
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def class_counts(self) -> tuple[int, int]:
        n0 = int(np.sum(self.labels == 0))
        return n0, self.num_rows - n0

    @property
    def class0_fraction(self) -> float:
        if self.num_rows == 0:
            raise InputError("class fraction is undefined for an empty sample")
        return self.class_counts[0] / self.num_rows

    def prefix(self, n: int) -> "LabeledSample":
        if not 0 <= n <= self.num_rows:
            raise InputError(f"prefix length {n} outside [0, {self.num_rows}]")
        return LabeledSample(self.features[:n], self.labels[:n], self.feature_names)

    @cached_property
    def moments(self) -> SampleMoments:
        return compute_moments(self)


def compute_moments(sample: LabeledSample) -> SampleMoments:
    """One pass over the rows filling per-class and pooled accumulators."""
    dim = sample.num_features
    acc = {0: _RunningMoments(dim), 1: _RunningMoments(dim), "pooled": _RunningMoments(dim)}
    for row, label in zip(sample.features, sample.labels):
        acc[int(label)].update(row)
        acc["pooled"].update(row)
    return SampleMoments(acc[0].snapshot(), acc[1].snapshot(), acc["pooled"].snapshot())


@dataclass(frozen=True)
class SubsetStats:
    """Per-class and pooled statistics restricted to one feature subset."""

    subset: tuple[int, ...]
    class0: MomentSummary
    class1: MomentSummary
    pooled: MomentSummary

    def scope(self, which: Scope) -> MomentSummary:
        if which == 0:
            return self.class0
        if which == 1:
            return self.class1
        if which == "pooled":
            return self.pooled
        raise InputError(f"unknown scope {which!r}; expected 0, 1, or 'pooled'")


def compute_stats(sample: LabeledSample, subset: FeatureSet | Iterable[int]) -> SubsetStats:
    """Slice the subset's rows and columns out of the full-sample moments."""
    indices = tuple(subset.indices) if isinstance(subset, FeatureSet) else tuple(subset)
    if len(indices) == 0:
        raise InputError("subset must be non-empty")
    if any(i < 0 or i >= sample.num_features for i in indices):
        raise InputError(
            f"subset {indices} is outside the feature range [0, {sample.num_features})"
        )
    moments = sample.moments
    return SubsetStats(
        indices,
        moments.class0.restrict(indices),
        moments.class1.restrict(indices),
        moments.pooled.restrict(indices),
    )


def _failing_pivot(matrix: np.ndarray) -> int:
    for k in range(matrix.shape[0]):
        try:
            np.linalg.cholesky(matrix[: k + 1, : k + 1])
        except np.linalg.LinAlgError:
            return k
    return matrix.shape[0] - 1


def log_det_spd(matrix: np.ndarray) -> float:
    """Log-determinant of a symmetric positive-definite matrix via Cholesky.

    Raises :class:`NotPositiveDefiniteError` carrying the 0-based index of
    the first failing pivot when the factorization breaks down.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise InputError("expected a non-empty matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if not np.allclose(m, m.T, rtol=1e-9, atol=1e-12 * scale):
        raise InputError("matrix is not symmetric")
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        pivot = _failing_pivot(m)
        raise NotPositiveDefiniteError(
            f"matrix is not positive-definite (first failing pivot index {pivot})",
            pivot=pivot,
        ) from None
    return 2.0 * float(np.sum(np.log(np.diagonal(chol))))


def mixture_sigma_n(truth, subset: FeatureSet | Iterable[int], rho: float) -> np.ndarray:
    """Label-mixture covariance that the pooled sample covariance tracks.

    Returns ``rho*S0 + (1-rho)*S1 + rho*(1-rho)*d d^T`` where ``S_y`` and the
    mean gap ``d = mu0 - mu1`` are the ground-truth subset moments.
    """
    if not 0.0 <= rho <= 1.0:
        raise InputError(f"rho must be in [0, 1], got {rho}")
    indices = tuple(subset.indices) if isinstance(subset, FeatureSet) else tuple(subset)
    mu0 = truth.mean_subset(0, indices)
    mu1 = truth.mean_subset(1, indices)
    s0 = truth.cov_subset(0, indices)
    s1 = truth.cov_subset(1, indices)
    gap = mu0 - mu1
    return rho * s0 + (1.0 - rho) * s1 + rho * (1.0 - rho) * np.outer(gap, gap)
