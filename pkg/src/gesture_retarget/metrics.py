"""Gesture-set statistics: motion variance, Frechet Gesture Distance (FGD),
and percentile-based selection of introvert/normal/extrovert examples.

All variances and covariances are population (divide by N) estimates.
FGD is the closed-form Frechet distance between Gaussians fitted to raw
pose features, so its absolute values are not comparable to distances
computed in a learned feature space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, InsufficientSamples, NonPSD, TooFewItems
from .model import PoseSequence

EIG_TOL = 1e-9

FLAT_POSITIONS = "flat_positions"
JOINT_SPEEDS = "per_frame_joint_speeds"
FEATURE_KINDS = (FLAT_POSITIONS, JOINT_SPEEDS)


@dataclass(frozen=True)
class FeatureSpec:
    kind: str = FLAT_POSITIONS

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"feature kind must be one of {FEATURE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True, eq=False)
class GaussianFit:
    mean: np.ndarray
    covariance: np.ndarray
    sample_count: int

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def motion_variance(seq: PoseSequence) -> float:
    """Mean over all joint coordinates of their variance over time."""
    pos = seq.positions
    # offsetting by frame 0 is exact for static clips and keeps translation
    # from leaking rounding error into the result
    centred = pos - pos[0]
    return float(np.mean(np.var(centred, axis=0)))


def fit_gaussian(features: Iterable[Sequence[float]]) -> GaussianFit:
    rows = [np.atleast_1d(np.asarray(f, dtype=float)) for f in features]
    if len(rows) < 2:
        raise InsufficientSamples(f"need at least 2 feature vectors, got {len(rows)}")
    dims = {r.shape for r in rows}
    if len(dims) != 1 or rows[0].ndim != 1:
        raise DimensionMismatch(f"feature vectors have inconsistent shapes: {sorted(dims)}")
    x = np.stack(rows)
    mean = x.mean(axis=0)
    centred = x - mean
    cov = centred.T @ centred / x.shape[0]
    cov = (cov + cov.T) / 2.0
    return GaussianFit(mean=mean, covariance=cov, sample_count=x.shape[0])


def _psd_eigh(mat: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    sym = (mat + mat.T) / 2.0
    w, v = np.linalg.eigh(sym)
    if w.size and w.min() < -EIG_TOL:
        raise NonPSD(f"{what} has eigenvalue {w.min():.3e} below -{EIG_TOL:g}")
    return np.clip(w, 0.0, None), v


def frechet_distance(g1: GaussianFit, g2: GaussianFit) -> float:
    """Squared Frechet (2-Wasserstein) distance between two Gaussians.

    The trace of ``(S1 S2)^(1/2)`` is evaluated as the sum of square roots
    of the eigenvalues of the symmetric matrix ``S1^(1/2) S2 S1^(1/2)``.
    """
    if g1.dim != g2.dim:
        raise DimensionMismatch(f"dimensions differ: {g1.dim} vs {g2.dim}")
    diff = g1.mean - g2.mean
    w1, v1 = _psd_eigh(g1.covariance, "first covariance")
    _psd_eigh(g2.covariance, "second covariance")
    s1_half = (v1 * np.sqrt(w1)) @ v1.T
    inner = s1_half @ ((g2.covariance + g2.covariance.T) / 2.0) @ s1_half
    w_inner, _ = _psd_eigh(inner, "covariance product")
    tr_sqrt = float(np.sum(np.sqrt(w_inner)))
    dist = float(diff @ diff) + float(np.trace(g1.covariance) + np.trace(g2.covariance)) - 2.0 * tr_sqrt
    return max(dist, 0.0)


def extract_features(seq: PoseSequence, spec: FeatureSpec = FeatureSpec()) -> np.ndarray:
    """Rows of per-frame features.

    ``flat_positions`` gives one 30-vector per frame; ``per_frame_joint_speeds``
    gives, for frames 1..N-1, each joint's displacement from the previous
    frame times fps.
    """
    pos = seq.positions
    if spec.kind == FLAT_POSITIONS:
        return pos.reshape(pos.shape[0], -1)
    disp = np.diff(pos, axis=0)
    return np.linalg.norm(disp, axis=2) * seq.fps


def fgd_between_sets(set_a: Sequence[PoseSequence], set_b: Sequence[PoseSequence],
                     spec: FeatureSpec = FeatureSpec()) -> float:
    def fit(seqs):
        feats = [extract_features(s, spec) for s in seqs]
        rows = np.concatenate(feats, axis=0) if feats else np.empty((0, 0))
        return fit_gaussian(list(rows))

    return frechet_distance(fit(set_a), fit(set_b))


def select_style_ids(variances: Mapping[str, float],
                     percentiles: tuple[float, float, float] = (10.0, 50.0, 90.0)
                     ) -> tuple[str, str, str]:
    """Pick (introvert, normal, extrovert) ids nearest the given percentiles.

    Distance ties go to the lexicographically smallest id; an id already
    taken by a lower percentile is skipped in favour of the next nearest.
    """
    if len(variances) < 3:
        raise TooFewItems(f"need at least 3 items, got {len(variances)}")
    if len(percentiles) != 3:
        raise ValueError("exactly three percentiles are required")
    ids = sorted(variances)
    values = np.array([float(variances[i]) for i in ids])
    if not np.all(np.isfinite(values)):
        raise ValueError("variances must be finite")
    targets = np.percentile(values, list(percentiles))
    chosen: list[str] = []
    for target in targets:
        ranked = sorted(zip(np.abs(values - target), ids))
        chosen.append(next(i for _, i in ranked if i not in chosen))
    return chosen[0], chosen[1], chosen[2]
