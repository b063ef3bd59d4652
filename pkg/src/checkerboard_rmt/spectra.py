"""Eigensolution and the empirical spectral measures.

Three measures are built from a spectrum: the bulk measure (eigenvalues
scaled by 1/sqrt(N), uniform weights), the blip measure (eigenvalues shifted
by N/k and weighted by a steep polynomial that is ~1 near the k outlier
eigenvalues and ~0 on the bulk), and the average of blip measures over
several independent matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DivisionAlgebra, HermitianMatrix, embed_quaternion_blocks
from .exceptions import EigensolveError, NumericalDegeneracyError, ParameterError

__all__ = [
    "Spectrum",
    "AtomicMeasure",
    "BlipConfig",
    "HistogramTable",
    "default_blip_half_degree",
    "default_average_count",
    "eigensolve",
    "batch_eigenvalues",
    "bulk_measure",
    "blip_weight",
    "blip_measure",
    "averaged_blip_measure",
    "histogram",
    "default_blip_range",
]

_KRAMERS_RTOL = 1e-8
_TRACE_RTOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Sorted real eigenvalues of a self-adjoint matrix."""

    eigenvalues: np.ndarray
    source_dimension: int

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", vals)
        if vals.ndim != 1 or vals.size != self.source_dimension:
            raise ParameterError(f"expected {self.source_dimension} eigenvalues, got shape {vals.shape}")
        if vals.size > 1 and np.any(np.diff(vals) < 0):
            raise ParameterError("eigenvalues must be sorted ascending")


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite measure given by point masses: (location, weight) atoms."""

    locations: np.ndarray
    weights: np.ndarray
    normalization_note: str = ""

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", wts)
        if loc.shape != wts.shape or loc.ndim != 1:
            raise ParameterError(f"locations and weights must be matching 1-d arrays, got {loc.shape} and {wts.shape}")
        if wts.size and float(wts.min()) < 0.0:
            raise ParameterError("atom weights must be nonnegative")

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def default_blip_half_degree(dim: int) -> int:
    """Default half-degree n of the blip weight polynomial: ceil(sqrt(N))."""
    return max(1, math.isqrt(dim - 1) + 1) if dim > 1 else 1


def default_average_count(dim: int) -> int:
    """Default number of matrices averaged in a blip experiment."""
    return max(8, math.ceil(dim ** 0.25))


@dataclass(frozen=True)
class BlipConfig:
    """Parameters of the blip measure for one matrix dimension."""

    n: int
    shift: float
    scale: float

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"weight half-degree must be >= 1, got {self.n}")

    @classmethod
    def for_dimension(cls, dim: int, k: int, n: "int | None" = None) -> "BlipConfig":
        if not 1 <= k <= dim:
            raise ParameterError(f"need 1 <= k <= dim, got k={k}, dim={dim}")
        return cls(n=n if n is not None else default_blip_half_degree(dim), shift=dim / k, scale=k / dim)

    def check_dimension(self, dim: int, k: int) -> None:
        if self.shift != dim / k:
            raise ParameterError(f"blip config shift {self.shift} inconsistent with dim/k = {dim / k}")


def eigensolve(matrix: HermitianMatrix) -> Spectrum:
    """Eigenvalues of a self-adjoint matrix, ascending.

    Quaternion matrices are diagonalized through their complex embedding;
    the doubled eigenvalue pairs are checked (relative 1e-8) and collapsed.
    """
    if matrix.algebra is DivisionAlgebra.QUATERNION:
        grid = embed_quaternion_blocks(matrix.data)
    else:
        grid = matrix.data
    try:
        vals = np.linalg.eigvalsh(grid)
    except np.linalg.LinAlgError as exc:
        raise EigensolveError(f"eigendecomposition failed for dim={matrix.dim} algebra={matrix.algebra.value}: {exc}") from exc
    if matrix.algebra is DivisionAlgebra.QUATERNION:
        vals = _collapse_doubled(vals)
    total = vals.sum()
    trace = matrix.trace()
    if abs(total - trace) > _TRACE_RTOL * max(1.0, abs(trace), float(np.abs(vals).sum())):
        raise NumericalDegeneracyError(
            f"eigenvalue sum {total} disagrees with trace {trace} (dim={matrix.dim}, algebra={matrix.algebra.value})"
        )
    return Spectrum(vals, matrix.dim)


def _collapse_doubled(vals: np.ndarray) -> np.ndarray:
    """Keep every second eigenvalue of a spectrum with exact double multiplicity."""
    first, second = vals[..., 0::2], vals[..., 1::2]
    scale = np.maximum(1.0, np.maximum(np.abs(first), np.abs(second)))
    bad = np.abs(first - second) > _KRAMERS_RTOL * scale
    if np.any(bad):
        raise NumericalDegeneracyError(
            "embedded spectrum is not doubled to relative 1e-8; worst pair "
            f"({first[bad][0]}, {second[bad][0]})"
        )
    return first


def batch_eigenvalues(batch: np.ndarray, algebra: DivisionAlgebra) -> np.ndarray:
    """Eigenvalues of a stack of self-adjoint grids, shape (trials, k)."""
    algebra = DivisionAlgebra.parse(algebra)
    if algebra is DivisionAlgebra.QUATERNION:
        return _collapse_doubled(np.linalg.eigvalsh(embed_quaternion_blocks(batch)))
    return np.linalg.eigvalsh(batch)


def bulk_measure(spectrum: Spectrum) -> AtomicMeasure:
    """Unit-mass measure with an atom of weight 1/N at each eigenvalue / sqrt(N)."""
    n = spectrum.source_dimension
    if n < 1:
        raise ParameterError("empty spectrum")
    return AtomicMeasure(
        spectrum.eigenvalues / math.sqrt(n),
        np.full(n, 1.0 / n),
        normalization_note="probability measure: weight 1/N at eigenvalue/sqrt(N)",
    )


def blip_weight(x, n: int):
    """The window polynomial x^(2n) * (x-2)^(2n).

    Evaluated as exp(2n * (log|x| + log|x - 2|)) so that large n neither
    overflows at the window plateau nor traps spurious values on the bulk:
    underflow flushes to exactly 0, and the roots x = 0, 2 give exactly 0.
    """
    if n < 1:
        raise ParameterError(f"weight half-degree must be >= 1, got {n}")
    arr = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        logs = np.log(np.abs(arr)) + np.log(np.abs(arr - 2.0))
        out = np.exp(2.0 * n * logs)
    return out if arr.ndim else float(out)


def blip_measure(spectrum: Spectrum, k: int, cfg: BlipConfig) -> AtomicMeasure:
    """Measure with one atom per eigenvalue at lambda - N/k, weighted by the window.

    Bulk eigenvalues receive weight ~0, the k outliers ~1/k each, so the total
    mass is close to (but not exactly) 1.
    """
    n_dim = spectrum.source_dimension
    cfg.check_dimension(n_dim, k)
    lam = spectrum.eigenvalues
    weights = blip_weight(k * lam / n_dim, cfg.n) / k
    return AtomicMeasure(
        lam - cfg.shift,
        weights,
        normalization_note=f"blip measure: window half-degree n={cfg.n}, divided by k={k}",
    )


def averaged_blip_measure(matrices, k: int, cfg: BlipConfig) -> AtomicMeasure:
    """Arithmetic mean of the blip measures of several same-size matrices.

    Accepts HermitianMatrix or pre-computed Spectrum elements.
    """
    spectra = [m if isinstance(m, Spectrum) else eigensolve(m) for m in matrices]
    if not spectra:
        raise ParameterError("need at least one matrix to average")
    dims = {s.source_dimension for s in spectra}
    if len(dims) != 1:
        raise ParameterError(f"matrices must share one dimension, got {sorted(dims)}")
    count = len(spectra)
    parts = [blip_measure(s, k, cfg) for s in spectra]
    return AtomicMeasure(
        np.concatenate([p.locations for p in parts]),
        np.concatenate([p.weights for p in parts]) / count,
        normalization_note=f"average of {count} blip measures",
    )


@dataclass(frozen=True)
class HistogramTable:
    """Binned density table; integrates to the total mass of its source measure."""

    bin_edges: np.ndarray
    density: np.ndarray

    @property
    def bin_lo(self) -> np.ndarray:
        return self.bin_edges[:-1]

    @property
    def bin_hi(self) -> np.ndarray:
        return self.bin_edges[1:]

    def rows(self):
        return list(zip(self.bin_lo.tolist(), self.bin_hi.tolist(), self.density.tolist()))


def default_blip_range(k: int) -> tuple[float, float]:
    """Plot window covering the blip fluctuations around their mean k - 1."""
    spread = 6.0 * math.sqrt(max(k - 1, 1))
    return (-(k - 1) - spread, (k - 1) + spread)


def histogram(measure: AtomicMeasure, bins: int, value_range: "tuple[float, float] | None" = None) -> HistogramTable:
    """Accumulate atom weights into equal-width bins, rescaled to total mass.

    The default range spans the atoms carrying more than 1e-6 of the total
    mass, padded by 5%.
    """
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    total = measure.total_mass
    if value_range is None:
        keep = measure.weights > 1e-6 * total
        if not np.any(keep):
            keep = np.ones_like(measure.weights, dtype=bool)
        lo = float(measure.locations[keep].min())
        hi = float(measure.locations[keep].max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        value_range = (lo - pad, hi + pad)
    lo, hi = float(value_range[0]), float(value_range[1])
    if lo >= hi:
        raise ParameterError(f"empty histogram range [{lo}, {hi})")
    counts, edges = np.histogram(measure.locations, bins=bins, range=(lo, hi), weights=measure.weights)
    included = counts.sum()
    width = np.diff(edges)
    density = counts / width
    if included > 0.0:
        density = density * (total / included)
    return HistogramTable(edges, density)
