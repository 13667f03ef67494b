"""Matrix exponential and its higher-order derivatives.

Two independent routes compute the n-th derivative of exp at a Hermitian
point applied to direction matrices:

  * exp_derivative_dd: exact eigenbasis contraction against divided
    differences of exp over eigenvalue chains.
  * exp_derivative_mc: Monte-Carlo quadrature of the simplex integral
    sum over orderings of exp(t0 x) v exp(t1 x) ... exp(tn x), with the
    simplex carrying total mass 1/n!.

Both accept a complex scale factor z and differentiate at z*x, which is
how the Fourier path evaluates derivatives at purely imaginary arguments.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import rng
from .divided import derivative_in_eigenbasis, exp_dd_scaled
from .errors import CapExceededError, OverflowRangeError, ParseError
from .linalg import HermitianMatrix, as_array, eig, frobenius, validate_matrix

EXP_DERIV_MAX_N = 4
EXP_DERIV_MAX_DIM = 32
SIMPLEX_MAX_N = 8
EXP_ARG_LIMIT = 700.0


@dataclass
class MultilinearDerivative:
    """Result of applying an n-th derivative to a tuple of directions."""

    matrix: np.ndarray
    order: int
    method: str
    scale: complex = 1.0 + 0.0j
    samples: int | None = None
    std_error: np.ndarray | None = None
    seed: int | None = None


@dataclass
class VolumeEstimate:
    value: float
    std_error: float
    samples: int
    n: int
    seed: int


def reference_simplex_volume(n):
    """Exact mass of the n-simplex under the chain measure, 1/n!."""
    return 1.0 / factorial(n)


def _as_hermitian(x):
    return x if isinstance(x, HermitianMatrix) else HermitianMatrix(x)


def mat_exp(x, t=1.0):
    """exp(t x). Eigenbasis route for Hermitian x with real or imaginary t,
    scaling-and-squaring Taylor series otherwise."""
    t = complex(t)
    arr = as_array(x)
    scale = frobenius(arr)
    if scale * abs(t) > EXP_ARG_LIMIT:
        raise OverflowRangeError(
            f"mat_exp: ||x|| * |t| = {scale * abs(t):.3e} exceeds {EXP_ARG_LIMIT:g}"
        )
    hermitian = isinstance(x, HermitianMatrix) or (
        frobenius(arr - arr.conj().T) <= 1e-12 * max(scale, 1e-300)
    )
    if hermitian and (t.imag == 0.0 or t.real == 0.0):
        dec = x.eig() if isinstance(x, HermitianMatrix) else eig(arr)
        w = np.exp(t * dec.eigenvalues)
        return (dec.vectors * w) @ dec.vectors.conj().T

    b = t * arr
    norm = frobenius(b)
    squarings = max(0, int(np.ceil(np.log2(norm)))) if norm > 1.0 else 0
    b = b / (2.0**squarings)
    d = arr.shape[0]
    acc = np.eye(d, dtype=np.complex128)
    term = np.eye(d, dtype=np.complex128)
    for j in range(1, 60):
        term = term @ b / j
        acc = acc + term
        if frobenius(term) <= 1e-18 * frobenius(acc):
            break
    for _ in range(squarings):
        acc = acc @ acc
    return acc


def _rotate_dirs(dec, dirs):
    uh = dec.vectors.conj().T
    return [uh @ as_array(v) @ dec.vectors for v in dirs]


def _check_exp_args(x, dirs):
    h = _as_hermitian(x)
    n = len(dirs)
    if n > EXP_DERIV_MAX_N:
        raise CapExceededError(
            f"exp derivative: order {n} exceeds cap {EXP_DERIV_MAX_N}"
        )
    if h.dim > EXP_DERIV_MAX_DIM:
        raise CapExceededError(
            f"exp derivative: dimension {h.dim} exceeds cap {EXP_DERIV_MAX_DIM}"
        )
    for j, v in enumerate(dirs):
        if as_array(v).shape != (h.dim, h.dim):
            raise ParseError(f"direction {j}: shape mismatch with x")
    return h, n


def exp_derivative_dd(x, dirs, scale=1.0):
    """n-th derivative of exp at scale*x applied to dirs, via divided
    differences of exp over eigenvalue chains of x."""
    h, n = _check_exp_args(x, dirs)
    scale = complex(scale)
    dec = h.eig()
    lam = dec.eigenvalues
    if abs(scale.real) * max(np.max(np.abs(lam)), 0.0) > EXP_ARG_LIMIT:
        raise OverflowRangeError("exp derivative: spectrum too large for exp")
    z = np.array([scale], dtype=np.complex128)

    def dd(chain):
        return complex(exp_dd_scaled(chain, z)[0])

    core = derivative_in_eigenbasis(lam, _rotate_dirs(dec, dirs), dd)
    matrix = dec.vectors @ core @ dec.vectors.conj().T
    return MultilinearDerivative(matrix=matrix, order=n, method="dd", scale=scale)


def _mc_chunk(block, count, seed, lam, scale, dirs_eig, vectors):
    """One counter-seeded chunk: per-sample chain products in the original
    basis, reduced to (sum, sum of squares, count)."""
    n = len(dirs_eig)
    gen = rng.generator(seed, rng.STREAM_SIMPLEX, block)
    e = gen.standard_exponential((count, n + 1))
    t = e / e.sum(axis=1, keepdims=True)
    ex = np.exp(scale * np.multiply.outer(t, lam))
    d = len(lam)
    if n == 0:
        y = np.einsum("sa,ia,ja->sij", ex[:, 0, :], vectors, vectors.conj())
    else:
        # Chain diag(ex0) V_phi(1) diag(ex1) ... V_phi(n) diag(exn) as
        # batched matrix products over the sample axis.
        y = np.zeros((count, d, d), dtype=np.complex128)
        for phi in itertools.permutations(range(n)):
            m = (ex[:, 0, :, None] * dirs_eig[phi[0]][None, :, :]) * ex[:, 1, None, :]
            for j in range(1, n):
                m = m @ (dirs_eig[phi[j]][None, :, :] * ex[:, j + 1, None, :])
            y += m
        y /= factorial(n)
        y = vectors[None, :, :] @ y @ vectors.conj().T[None, :, :]
    return y.sum(axis=0), (y.real**2).sum(axis=0), (y.imag**2).sum(axis=0)


def exp_derivative_mc(x, dirs, samples, seed, scale=1.0, threads=1):
    """Monte-Carlo estimate of the exp derivative with per-entry standard
    errors: uniform simplex samples, E[integrand] / n! summed over
    direction orderings. Bit-reproducible for any thread count."""
    h, n = _check_exp_args(x, dirs)
    samples = int(samples)
    if samples < 2:
        raise ParseError("exp_derivative_mc: need at least 2 samples")
    scale = complex(scale)
    dec = h.eig()
    lam = dec.eigenvalues
    dirs_eig = _rotate_dirs(dec, dirs)
    chunks = list(rng.blocks(samples))
    work = [
        (block, count, seed, lam, scale, dirs_eig, dec.vectors)
        for block, count in chunks
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _mc_chunk(*a), work))
    else:
        results = [_mc_chunk(*a) for a in work]

    d = h.dim
    total = np.zeros((d, d), dtype=np.complex128)
    total_re2 = np.zeros((d, d))
    total_im2 = np.zeros((d, d))
    for sum_y, sum_re2, sum_im2 in results:
        total += sum_y
        total_re2 += sum_re2
        total_im2 += sum_im2
    mean = total / samples
    var_re = np.maximum(total_re2 / samples - mean.real**2, 0.0)
    var_im = np.maximum(total_im2 / samples - mean.imag**2, 0.0)
    bessel = samples / (samples - 1)
    se = np.sqrt(bessel * (var_re + var_im) / samples)
    return MultilinearDerivative(
        matrix=mean,
        order=n,
        method="mc",
        scale=scale,
        samples=samples,
        std_error=se,
        seed=int(seed),
    )


def sample_simplex(n, seed, index=0):
    """One uniform sample from the n-simplex: n+1 normalized exponentials.
    Deterministic per (seed, index)."""
    if n < 0 or n > SIMPLEX_MAX_N:
        raise CapExceededError(f"sample_simplex: n = {n} outside 0..{SIMPLEX_MAX_N}")
    gen = rng.generator(seed, rng.STREAM_SIMPLEX, index)
    e = gen.standard_exponential(n + 1)
    return e / e.sum()


def simplex_volume_mc(n, samples, seed, threads=1):
    """Monte-Carlo volume of {t in [0,1]^n : sum t <= 1}, expected 1/n!."""
    if n < 0 or n > SIMPLEX_MAX_N:
        raise CapExceededError(f"simplex_volume_mc: n = {n} outside 0..{SIMPLEX_MAX_N}")
    samples = int(samples)
    if n == 0:
        return VolumeEstimate(value=1.0, std_error=0.0, samples=samples, n=0, seed=int(seed))
    if samples < 2:
        raise ParseError("simplex_volume_mc: need at least 2 samples")

    def chunk_hits(block, count):
        gen = rng.generator(seed, rng.STREAM_VOLUME, block)
        u = gen.random((count, n))
        return int(np.count_nonzero(u.sum(axis=1) <= 1.0))

    work = list(rng.blocks(samples))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hits = sum(pool.map(lambda a: chunk_hits(*a), work))
    else:
        hits = sum(chunk_hits(*a) for a in work)
    p = hits / samples
    se = float(np.sqrt(p * (1.0 - p) / samples))
    return VolumeEstimate(value=p, std_error=se, samples=samples, n=n, seed=int(seed))
