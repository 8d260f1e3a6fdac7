"""Canonical Riemannian geometry of the cone of positive-definite forms.

The tangent space at a positive form b is the space of symmetric matrices,
carrying the inner product

    <X, Y>_b = trace(b^-1 X b^-1 Y),

which is invariant under every congruence b -> M^T b M, X -> M^T X M.  For
n = 1 this is the metric dx^2/x^2 on the positive half-line.  Curves of
positive forms arrive as samples; lengths use trapezoidal quadrature of the
speed with finite-difference tangents, and closed curves additionally carry
a canonical mean: the average of the curve against its arc-length measure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .multilinear import SPECTRAL_TOL


@dataclass
class SpdPoint:
    """A symmetric positive-definite n x n matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        m = (m + m.T) / 2.0
        eigs = np.linalg.eigvalsh(m)
        if eigs[0] <= SPECTRAL_TOL * max(eigs[-1], 0.0) or eigs[-1] <= 0.0:
            raise ValueError(
                f"matrix is not positive definite (eigenvalue range "
                f"[{eigs[0]:.3e}, {eigs[-1]:.3e}])"
            )
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SpdCurve:
    """Sampled curve of positive-definite forms.

    Parameters must be strictly increasing; a closed curve repeats its first
    point as the last sample (to 1e-10).
    """

    params: np.ndarray
    points: list[SpdPoint]
    closed: bool = False

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if self.params.ndim != 1 or len(self.points) != self.params.size:
            raise ValueError("params and points must have matching lengths")
        if np.any(np.diff(self.params) <= 0.0):
            raise ValueError("curve parameters must be strictly increasing")
        if self.closed and self.params.size >= 2:
            gap = np.max(np.abs(self.points[0].matrix - self.points[-1].matrix))
            if gap > 1e-10:
                raise ValueError(
                    f"closed curve endpoints differ by {gap:.3e} (> 1e-10)"
                )

    @classmethod
    def from_matrices(cls, params, matrices, closed: bool = False) -> "SpdCurve":
        return cls(
            params=np.asarray(params, dtype=float),
            points=[SpdPoint(m) for m in matrices],
            closed=closed,
        )

    @property
    def n(self) -> int:
        return self.points[0].n

    def matrices(self) -> np.ndarray:
        return np.stack([p.matrix for p in self.points])

    def pushforward(self, m: np.ndarray) -> "SpdCurve":
        """Congruence image of the whole curve by an invertible map."""
        m = np.asarray(m, dtype=float)
        return SpdCurve.from_matrices(
            self.params, [m.T @ p.matrix @ m for p in self.points], closed=self.closed
        )


def spd_inner(b: SpdPoint | np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Canonical inner product trace(b^-1 X b^-1 Y) of symmetric tangents at b."""
    bm = b.matrix if isinstance(b, SpdPoint) else SpdPoint(b).matrix
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for t in (x, y):
        if t.shape != bm.shape:
            raise ValueError(f"tangent of shape {t.shape}, expected {bm.shape}")
        if np.max(np.abs(t - t.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(t))):
            raise ValueError("tangent matrices must be symmetric")
    return float(np.trace(np.linalg.solve(bm, x) @ np.linalg.solve(bm, y)))


def _tangents(curve: SpdCurve) -> np.ndarray:
    """Central-difference tangents; closed curves wrap around the period."""
    mats = curve.matrices()
    t = curve.params
    m = len(t)
    out = np.zeros_like(mats)
    if curve.closed and m >= 3:
        # the last sample duplicates the first; differentiate on the period
        k = m - 1
        dts = np.diff(t)
        for i in range(k):
            ip = (i + 1) % k
            im = (i - 1) % k
            dt_fwd = dts[i]
            dt_back = dts[i - 1] if i > 0 else dts[-1]
            out[i] = (mats[ip] - mats[im]) / (dt_fwd + dt_back)
        out[k] = out[0]
        return out
    for i in range(m):
        if i == 0:
            out[i] = (mats[1] - mats[0]) / (t[1] - t[0])
        elif i == m - 1:
            out[i] = (mats[-1] - mats[-2]) / (t[-1] - t[-2])
        else:
            out[i] = (mats[i + 1] - mats[i - 1]) / (t[i + 1] - t[i - 1])
    return out


def _speeds(curve: SpdCurve) -> np.ndarray:
    mats = curve.matrices()
    tangents = _tangents(curve)
    speeds = np.zeros(len(curve.params))
    for i, (b, x) in enumerate(zip(mats, tangents)):
        val = float(np.trace(np.linalg.solve(b, x) @ np.linalg.solve(b, x)))
        speeds[i] = np.sqrt(max(val, 0.0))
    return speeds


def curve_length(curve: SpdCurve) -> float:
    """Trapezoidal length of the curve under the canonical metric."""
    if curve.params.size < 2:
        raise ValueError("need at least two samples to measure a length")
    return float(np.trapezoid(_speeds(curve), curve.params))


def arclength_reparam(curve: SpdCurve, m: int) -> SpdCurve:
    """Resample the curve at m points equally spaced in accumulated arc length."""
    if m < 2:
        raise ValueError(f"need at least two output samples, got {m}")
    t = curve.params
    speeds = _speeds(curve)
    seg = 0.5 * (speeds[1:] + speeds[:-1]) * np.diff(t)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0.0:
        raise ValueError("curve has zero length; cannot reparameterize")
    target = np.linspace(0.0, total, m)
    # invert s(t) by piecewise-linear interpolation, then interpolate samples
    t_of_s = np.interp(target, s, t)
    mats = curve.matrices()
    out = []
    for tv in t_of_s:
        j = int(np.clip(np.searchsorted(t, tv) - 1, 0, len(t) - 2))
        w = (tv - t[j]) / (t[j + 1] - t[j])
        out.append((1.0 - w) * mats[j] + w * mats[j + 1])
    return SpdCurve.from_matrices(target, out, closed=curve.closed)


def circle_mean(curve: SpdCurve) -> SpdPoint:
    """Arc-length average of a closed curve of positive forms.

    Computed as the quotient of the trapezoidal integrals of f ds and ds
    over one period, so the mean of a constant curve is that constant, and
    rotating the sample list changes nothing beyond float roundoff.  The
    result is a convex combination of positive forms, hence positive.
    """
    if not curve.closed:
        raise ValueError("the canonical mean is defined for closed curves only")
    if curve.params.size < 3:
        raise ValueError("need at least three samples on a closed curve")
    t = curve.params
    mats = curve.matrices()
    spread = float(np.max(np.abs(mats - mats[0])))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(mats[0])))):
        return SpdPoint(mats[0])  # constant curve: the mean is the point itself
    speeds = _speeds(curve)
    num = np.zeros_like(mats[0])
    den = 0.0
    for k in range(len(t) - 1):
        dt = t[k + 1] - t[k]
        num += 0.5 * (speeds[k] * mats[k] + speeds[k + 1] * mats[k + 1]) * dt
        den += 0.5 * (speeds[k] + speeds[k + 1]) * dt
    if den <= 0.0:
        raise ValueError("curve has zero length; the mean is undefined")
    return SpdPoint(num / den)
