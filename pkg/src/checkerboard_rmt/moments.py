"""Moment computations: empirical, closed-form, and exact-enumeration oracles.

The centered limit of the blip measure's m-th moment equals the m-th spectral
moment of the k x k hollow Gaussian ensemble, (1/k) E tr B^m.  For real and
complex entries that expectation is computed exactly here by enumerating the
closed index walks of tr B^m and scoring each by its Gaussian pairing count;
for quaternions the oracle falls back to Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import DivisionAlgebra, HermitianMatrix, embed_quaternion_blocks
from .ensembles import HollowParams, sample_hollow_batch
from .exceptions import EnumerationBudgetError, ParameterError, PrecisionLossError
from .spectra import AtomicMeasure, BlipConfig

__all__ = [
    "MAX_MOMENT",
    "MomentVector",
    "OracleResult",
    "measure_moments",
    "average_trial_moments",
    "catalan",
    "semicircle_moment",
    "alternating_binomial_sum",
    "hollow_moment_oracle",
    "monte_carlo_hollow_moment",
    "blip_limit_moment",
    "trace_expansion_blip_moment",
]

MAX_MOMENT = 32
ENUMERATION_BUDGET = 10**8
_MC_CHUNK = 32768


@dataclass(frozen=True)
class MomentVector:
    """Moments m = 0..M of a measure about a fixed center."""

    values: np.ndarray
    standard_errors: "np.ndarray | None" = None
    center: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.standard_errors is not None:
            object.__setattr__(self, "standard_errors", np.asarray(self.standard_errors, dtype=float))

    @property
    def centered(self) -> bool:
        return self.center != 0.0

    def __getitem__(self, m: int) -> float:
        return float(self.values[m])


def _check_max_m(max_m: int) -> None:
    if not 0 <= max_m <= MAX_MOMENT:
        raise ParameterError(f"moment order cap is {MAX_MOMENT}, got {max_m}")


def measure_moments(measure: AtomicMeasure, max_m: int, center: "float | None" = None) -> MomentVector:
    """values[m] = sum_i weight_i * (location_i - center)^m for m = 0..max_m."""
    _check_max_m(max_m)
    c = 0.0 if center is None else float(center)
    shifted = measure.locations - c
    powers = shifted[None, :] ** np.arange(max_m + 1)[:, None]
    return MomentVector(powers @ measure.weights, None, center=c)


def average_trial_moments(measures, max_m: int, center: "float | None" = None) -> MomentVector:
    """Mean of per-trial moment vectors with standard errors across trials."""
    table = np.array([measure_moments(m, max_m, center).values for m in measures])
    if table.shape[0] == 0:
        raise ParameterError("need at least one measure")
    mean = table.mean(axis=0)
    stderr = table.std(axis=0, ddof=1) / math.sqrt(table.shape[0]) if table.shape[0] > 1 else None
    return MomentVector(mean, stderr, center=0.0 if center is None else float(center))


def catalan(n: int) -> int:
    """The n-th Catalan number."""
    if n < 0:
        raise ParameterError(f"need n >= 0, got {n}")
    return math.comb(2 * n, n) // (n + 1)


def semicircle_moment(ell: int, k: int) -> Fraction:
    """Exact moment of the limiting bulk distribution: Catalan number times ((k-1)/k)^(ell/2).

    The limit is the semicircle of radius 2*sqrt(1 - 1/k); odd moments vanish.
    """
    if ell < 0:
        raise ParameterError(f"need ell >= 0, got {ell}")
    if k < 1:
        raise ParameterError(f"need k >= 1, got {k}")
    if ell % 2:
        return Fraction(0)
    half = ell // 2
    return catalan(half) * Fraction(k - 1, k) ** half


def alternating_binomial_sum(m: int, p: int) -> int:
    """sum_j (-1)^j C(m, j) j^p, exactly, with the convention 0^0 = 1.

    Vanishes for p < m and equals (-1)^m m! at p = m.
    """
    if not 0 <= p <= m <= 64:
        raise ParameterError(f"need 0 <= p <= m <= 64, got m={m}, p={p}")
    return sum((-1) ** j * math.comb(m, j) * j**p for j in range(m + 1))


# ---------------------------------------------------------------------------
# Exact hollow-ensemble trace moments by walk enumeration.
# ---------------------------------------------------------------------------


def _double_factorials(limit: int) -> list:
    df = [0] * (limit + 1)
    df[0] = 1
    for c in range(2, limit + 1, 2):
        df[c] = df[c - 2] * (c - 1)
    return df


def _wick_walk_sum_real(k: int, m: int) -> int:
    """E tr B^m over the k x k hollow GOE, as an exact integer.

    Sums over closed index walks of length m with no self-loops; a walk scores
    the number of ways to pair its entries with equal unordered index pairs,
    (c-1)!! per edge traversed c times, zero unless every count is even.
    Scores depend only on the walk's equality pattern, so the first two
    vertices are fixed and the result scaled by k(k-1).
    """
    if m == 0:
        return k
    if k == 1 or m == 1:
        return 0
    df = _double_factorials(m)
    counts: dict = {}

    def walk(pos: int, prev: int, odd: int) -> int:
        remaining = m - pos + 1  # edges still to place, the closing one included
        if odd > remaining or (odd ^ remaining) & 1:
            return 0
        if pos == m:
            if prev == 0:
                return 0  # closing entry would sit on the zero diagonal
            c = counts.get((0, prev), 0)
            if c % 2 == 0 or odd != 1:
                return 0
            counts[(0, prev)] = c + 1
            score = 1
            for cc in counts.values():
                score *= df[cc]
            counts[(0, prev)] = c
            return score
        acc = 0
        for nxt in range(k):
            if nxt == prev:
                continue
            edge = (prev, nxt) if prev < nxt else (nxt, prev)
            c = counts.get(edge, 0)
            counts[edge] = c + 1
            acc += walk(pos + 1, nxt, odd + (1 if c % 2 == 0 else -1))
            if c:
                counts[edge] = c
            else:
                del counts[edge]
        return acc

    counts[(0, 1)] = 1
    return k * (k - 1) * walk(2, 1, 1)


def _wick_walk_sum_complex(k: int, m: int) -> int:
    """E tr B^m over the k x k hollow GUE, as an exact integer.

    Entries are circular complex Gaussians, so only pairings of an entry with
    its conjugate contribute: an edge traversed p times in each direction
    scores p!, and any direction imbalance kills the walk.
    """
    if m == 0:
        return k
    if k == 1 or m == 1:
        return 0
    fact = [math.factorial(i) for i in range(m // 2 + 1)]
    state: dict = {}  # edge -> [total traversals, low-to-high minus high-to-low]

    def walk(pos: int, prev: int, imbalance: int) -> int:
        remaining = m - pos + 1
        if imbalance > remaining or (imbalance ^ remaining) & 1:
            return 0
        if pos == m:
            if prev == 0:
                return 0
            st = state.get((0, prev))
            # closing traversal runs high-to-low, so the edge must carry net +1
            if st is None or st[1] != 1 or imbalance != 1:
                return 0
            st[0] += 1
            score = 1
            for total, _net in state.values():
                score *= fact[total // 2]
            st[0] -= 1
            return score
        acc = 0
        for nxt in range(k):
            if nxt == prev:
                continue
            edge = (prev, nxt) if prev < nxt else (nxt, prev)
            sign = 1 if prev < nxt else -1
            st = state.setdefault(edge, [0, 0])
            old_net = st[1]
            st[0] += 1
            st[1] += sign
            acc += walk(pos + 1, nxt, imbalance - abs(old_net) + abs(st[1]))
            st[0] -= 1
            st[1] = old_net
            if st[0] == 0:
                del state[edge]
        return acc

    state[(0, 1)] = [1, 1]
    return k * (k - 1) * walk(2, 1, 1)


@lru_cache(maxsize=None)
def _exact_hollow_trace_moment(k: int, m: int, algebra: DivisionAlgebra) -> int:
    if algebra is DivisionAlgebra.REAL:
        return _wick_walk_sum_real(k, m)
    if algebra is DivisionAlgebra.COMPLEX:
        return _wick_walk_sum_complex(k, m)
    raise ParameterError("exact enumeration covers real and complex entries only")


@dataclass(frozen=True)
class OracleResult:
    """Value of (1/k) E tr B^m over a hollow Gaussian ensemble."""

    k: int
    m: int
    algebra: DivisionAlgebra
    value: float
    method: str  # "wick-exact" or "monte-carlo"
    exact: "Fraction | None" = None
    stderr: "float | None" = None
    trials: "int | None" = None


def monte_carlo_hollow_moment(
    k: int, m: int, algebra: "DivisionAlgebra | str" = DivisionAlgebra.REAL, trials: int = 100_000, seed: int = 0
) -> tuple:
    """Monte Carlo estimate of (1/k) E tr B^m with its standard error."""
    algebra = DivisionAlgebra.parse(algebra)
    if m < 0:
        raise ParameterError(f"need m >= 0, got {m}")
    if trials < 2:
        raise ParameterError(f"need at least 2 trials, got {trials}")
    if m == 0:
        return 1.0, 0.0
    params = HollowParams(k, algebra, seed)
    samples = np.empty(trials)
    filled = 0
    chunk_index = 0
    while filled < trials:
        take = min(_MC_CHUNK, trials - filled)
        batch = sample_hollow_batch(params, take, batch_index=chunk_index)
        if algebra is DivisionAlgebra.QUATERNION:
            grid = embed_quaternion_blocks(batch)
            denominator = 2 * k  # the embedding doubles every eigenvalue
        else:
            grid = batch
            denominator = k
        power = grid
        for _ in range(m - 1):
            power = power @ grid
        samples[filled : filled + take] = np.einsum("tii->t", power).real / denominator
        filled += take
        chunk_index += 1
    return float(samples.mean()), float(samples.std(ddof=1) / math.sqrt(trials))


def hollow_moment_oracle(
    k: int,
    m: int,
    algebra: "DivisionAlgebra | str" = DivisionAlgebra.REAL,
    *,
    trials: int = 200_000,
    seed: int = 0,
) -> OracleResult:
    """(1/k) E tr B^m: exact Wick enumeration for real/complex, Monte Carlo for quaternion."""
    algebra = DivisionAlgebra.parse(algebra)
    if k < 1 or m < 0:
        raise ParameterError(f"need k >= 1 and m >= 0, got k={k}, m={m}")
    if algebra is DivisionAlgebra.QUATERNION:
        mean, stderr = monte_carlo_hollow_moment(k, m, algebra, trials=trials, seed=seed)
        return OracleResult(k, m, algebra, mean, "monte-carlo", stderr=stderr, trials=trials)
    if k**m > ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"enumeration of k^m = {k**m} index walks exceeds the {ENUMERATION_BUDGET} budget; "
            "use monte_carlo_hollow_moment instead"
        )
    exact = Fraction(_exact_hollow_trace_moment(k, m, algebra), k)
    return OracleResult(k, m, algebra, float(exact), "wick-exact", exact=exact)


def blip_limit_moment(
    k: int,
    m: int,
    algebra: "DivisionAlgebra | str" = DivisionAlgebra.REAL,
    centered: bool = True,
    *,
    trials: int = 200_000,
    seed: int = 0,
) -> float:
    """Limiting m-th moment of the blip measure.

    Centered (about the mean k - 1) it equals the hollow-ensemble moment
    (1/k) E tr B^m; uncentered it is the binomial mixture
    (1/k) sum_j C(m, j) (k-1)^(m-j) E tr B^j.
    """
    algebra = DivisionAlgebra.parse(algebra)

    def oracle_value(order):
        res = hollow_moment_oracle(k, order, algebra, trials=trials, seed=seed)
        return res.exact if res.exact is not None else res.value

    if centered:
        return float(oracle_value(m))
    total = sum(math.comb(m, j) * (k - 1) ** (m - j) * oracle_value(j) for j in range(m + 1))
    return float(total)


# ---------------------------------------------------------------------------
# Exact per-matrix evaluation of the binomial trace expansion.
# ---------------------------------------------------------------------------


def _exact_entry_grid(matrix: HermitianMatrix) -> list:
    """Matrix entries as tuples of Fractions (floats convert exactly)."""
    n = matrix.dim
    if matrix.algebra is DivisionAlgebra.REAL:
        return [[(Fraction(matrix.data[i, j]),) for j in range(n)] for i in range(n)]
    if matrix.algebra is DivisionAlgebra.COMPLEX:
        return [
            [(Fraction(matrix.data[i, j].real), Fraction(matrix.data[i, j].imag)) for j in range(n)] for i in range(n)
        ]
    return [[tuple(Fraction(c) for c in matrix.data[i, j]) for j in range(n)] for i in range(n)]


def _scalar_mul(a: tuple, b: tuple) -> tuple:
    if len(a) == 1:
        return (a[0] * b[0],)
    if len(a) == 2:
        return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])
    ar, ai, aj, ak = a
    br, bi, bj, bk = b
    return (
        ar * br - ai * bi - aj * bj - ak * bk,
        ar * bi + ai * br + aj * bk - ak * bj,
        ar * bj - ai * bk + aj * br + ak * bi,
        ar * bk + ai * bj - aj * bi + ak * br,
    )


def _exact_power_traces(matrix: HermitianMatrix, max_power: int) -> list:
    """[tr A^0, ..., tr A^max_power] over exact rational arithmetic."""
    n = matrix.dim
    ncomp = matrix.algebra.components
    grid = _exact_entry_grid(matrix)
    zero = (Fraction(0),) * ncomp
    traces = [Fraction(n)]
    power = None
    for _ in range(max_power):
        if power is None:
            power = grid
        else:
            nxt = [[zero] * n for _ in range(n)]
            for i in range(n):
                row = power[i]
                out_row = nxt[i]
                for l in range(n):
                    a = row[l]
                    if all(c == 0 for c in a):
                        continue
                    other = grid[l]
                    for j in range(n):
                        prod = _scalar_mul(a, other[j])
                        cur = out_row[j]
                        out_row[j] = tuple(x + y for x, y in zip(cur, prod))
            power = nxt
        traces.append(sum(power[i][i][0] for i in range(n)))
    return traces


def trace_expansion_blip_moment(
    matrix: HermitianMatrix, k: int, cfg: BlipConfig, m: int, *, exact: bool = True
) -> float:
    """m-th blip moment of one fixed matrix via the binomial trace expansion.

    Algebraically identical to the directly weighted spectral moment
    sum f_n(k*lambda/N) (lambda - N/k)^m / k, but evaluated from traces of
    matrix powers.  The alternating sum cancels terms of size (N/k)^m down to
    an O(1) result, so the default path uses exact rational arithmetic; the
    floating path raises PrecisionLossError past 1e12 relative cancellation.
    """
    dim = matrix.dim
    cfg.check_dimension(dim, k)
    if m < 0 or m > MAX_MOMENT:
        raise ParameterError(f"need 0 <= m <= {MAX_MOMENT}, got {m}")
    if dim > 16 or cfg.n > 3:
        raise ParameterError(f"desk-scale evaluation requires dim <= 16 and n <= 3, got dim={dim}, n={cfg.n}")
    two_n = 2 * cfg.n
    max_power = 2 * two_n + m
    if exact:
        traces = _exact_power_traces(matrix, max_power)
        base = Fraction(-dim, k)
        acc = Fraction(0)
        for j in range(two_n + 1):
            outer = math.comb(two_n, j)
            for i in range(m + j + 1):
                acc += outer * math.comb(m + j, i) * base ** (m - i) * traces[two_n + i]
        return float(acc * Fraction(k, dim) ** two_n / k)
    traces_f = [float(t) for t in _exact_power_traces(matrix, max_power)]
    base_f = -dim / k
    acc_f = 0.0
    max_term = 0.0
    for j in range(two_n + 1):
        outer = math.comb(two_n, j)
        for i in range(m + j + 1):
            term = outer * math.comb(m + j, i) * base_f ** (m - i) * traces_f[two_n + i]
            acc_f += term
            max_term = max(max_term, abs(term))
    result = acc_f * (k / dim) ** two_n / k
    if max_term > 0.0 and max_term > 1e12 * abs(acc_f):
        raise PrecisionLossError(
            f"cancellation of {max_term:.3e} down to {acc_f:.3e} exceeds 1e12; use the exact path"
        )
    return result
