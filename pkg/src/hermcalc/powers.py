"""Derivatives of matrix powers and power series.

The n-th derivative of x -> x^k in the direction tuple (v_1, ..., v_n)
expands as a sum over all permutations of the directions and all ways to
split the remaining k - n copies of x around them:

    sum over phi in S_n, alpha in compositions(n, k - n) of
        x^alpha_0 v_phi(1) x^alpha_1 ... v_phi(n) x^alpha_n

The sum is empty (zero matrix) for k < n. Terms are evaluated with cached
powers of x and accumulated in a fixed canonical order (permutations lex,
compositions lex), so results are reproducible bit for bit.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .combinatorics import composition_count, enum_compositions, enum_permutations
from .errors import CapExceededError, ParseError
from .linalg import as_array, validate_matrix

POWER_MAX_N = 5
POWER_MAX_K = 12
SERIES_TERM_BUDGET = 10**7


def matrix_powers(x, kmax):
    """List [I, x, x^2, ..., x^kmax], each built as previous @ x."""
    d = x.shape[0]
    pows = [np.eye(d, dtype=np.complex128)]
    if kmax >= 1:
        pows.append(np.array(x, dtype=np.complex128))
    for _ in range(2, kmax + 1):
        pows.append(pows[-1] @ x)
    return pows


def chain_product(pows, dirs_seq, alpha):
    """Evaluate x^alpha_0 v_1 x^alpha_1 ... v_n x^alpha_n left to right.

    Identity factors (alpha_j = 0) are skipped. Both power_derivative and
    the word-expansion oracle route through here, which is what makes
    their term values identical down to the last bit.
    """
    m = pows[alpha[0]] if alpha[0] > 0 else None
    for v, a in zip(dirs_seq, alpha[1:]):
        m = v if m is None else m @ v
        if a > 0:
            m = m @ pows[a]
    if m is None:
        m = pows[0]
    return m


def _check_dirs(x, dirs):
    arrs = []
    for j, v in enumerate(dirs):
        arr = as_array(v)
        if arr.shape != x.shape:
            raise ParseError(
                f"direction {j}: shape {arr.shape} does not match matrix {x.shape}"
            )
        arrs.append(arr)
    return arrs


def _power_derivative_impl(k, n, x, dirs):
    d = x.shape[0]
    out = np.zeros((d, d), dtype=np.complex128)
    if k < n:
        return out
    pows = matrix_powers(x, k - n if n > 0 else k)
    comps = enum_compositions(n, k - n)
    for phi in enum_permutations(n):
        dirs_seq = [dirs[i - 1] for i in phi]
        for alpha in comps:
            out += chain_product(pows, dirs_seq, alpha)
    return out


def power_derivative(k, n, x, dirs):
    """n-th derivative of x -> x^k at x, applied to the direction tuple.

    Works in any matrix algebra: x and the directions are arbitrary
    square complex matrices of the same size. Returns the zero matrix
    when k < n.
    """
    if not (0 <= n <= POWER_MAX_N):
        raise CapExceededError(f"power_derivative: order n = {n} outside 0..{POWER_MAX_N}")
    if not (0 <= k <= POWER_MAX_K):
        raise CapExceededError(f"power_derivative: power k = {k} outside 0..{POWER_MAX_K}")
    if len(dirs) != n:
        raise ParseError(f"power_derivative: expected {n} directions, got {len(dirs)}")
    xa = as_array(x)
    return _power_derivative_impl(k, n, xa, _check_dirs(xa, dirs))


@dataclass
class PowerSeries:
    """Entire-function surrogate sum_k coeffs[k] t^k with explicit truncation."""

    coeffs: np.ndarray
    label: str = "series"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ParseError("PowerSeries: coeffs must be a nonempty 1-d sequence")

    @classmethod
    def exponential(cls, k_max=25):
        """Truncated exponential series; tail beyond k_max is below
        r^(k_max+1)/(k_max+1)! on |t| <= r."""
        return cls(np.array([1.0 / factorial(j) for j in range(k_max + 1)]), label="exp")

    def degree(self):
        return len(self.coeffs) - 1

    def evaluate(self, t):
        acc = np.zeros_like(np.asarray(t, dtype=np.complex128))
        for c in self.coeffs[::-1]:
            acc = acc * t + c
        return acc


def series_derivative(series, n, x, dirs):
    """n-th derivative of x -> sum_k a_k x^k, term by term in ascending k."""
    if n < 0 or n > POWER_MAX_N:
        raise CapExceededError(f"series_derivative: order n = {n} outside 0..{POWER_MAX_N}")
    if len(dirs) != n:
        raise ParseError(f"series_derivative: expected {n} directions, got {len(dirs)}")
    xa = as_array(x)
    dirs_a = _check_dirs(xa, dirs)
    kmax = series.degree()
    terms = sum(
        factorial(n) * composition_count(n, k - n) for k in range(n, kmax + 1)
    )
    if terms > SERIES_TERM_BUDGET:
        raise CapExceededError(
            f"series_derivative: {terms} expansion terms exceeds budget {SERIES_TERM_BUDGET}"
        )
    d = xa.shape[0]
    out = np.zeros((d, d), dtype=np.complex128)
    for k in range(kmax + 1):
        c = series.coeffs[k]
        if c == 0:
            continue
        out += c * _power_derivative_impl(k, n, xa, dirs_a)
    return out
