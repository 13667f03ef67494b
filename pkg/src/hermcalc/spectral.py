"""Scalar functions applied to Hermitian matrices, and their derivatives.

apply_function evaluates g on the spectrum. function_derivative_dd
contracts divided differences of g over eigenvalue chains (exact route).
function_derivative_fourier synthesizes the same derivative from a
frequency table: mollify g to compact support, transform, then integrate
    integral of ghat(s) (is)^n D^n(exp)(isx)[dirs] ds,
which needs only derivatives of exp at imaginary arguments. The two
routes are algorithmically independent, which is what makes their
agreement a meaningful check.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .divided import cluster_tolerance, derivative_in_eigenbasis, exp_dd_scaled
from .errors import CapExceededError, GridError, ParseError, RadiusError
from .expderiv import EXP_DERIV_MAX_DIM, EXP_DERIV_MAX_N, MultilinearDerivative
from .linalg import HermitianMatrix, as_array

FOURIER_S_MAX_CAP = 640.0
FOURIER_TAIL_TOL = 1e-8


def _as_hermitian(x):
    return x if isinstance(x, HermitianMatrix) else HermitianMatrix(x)


def _hermitian_dirs(dirs):
    out = []
    for j, v in enumerate(dirs):
        try:
            out.append(HermitianMatrix(v).array)
        except ParseError as exc:
            raise ParseError(f"direction {j}: {exc}") from None
    return out


def apply_function(g, x):
    """g(x) for Hermitian x: eigenvalues mapped through g."""
    h = _as_hermitian(x)
    dec = h.eig()
    vals = np.asarray(g.eval_derivative(dec.eigenvalues, 0), dtype=np.complex128)
    return (dec.vectors * vals) @ dec.vectors.conj().T


def function_derivative_dd(g, x, dirs):
    """n-th derivative of x -> g(x) applied to Hermitian directions,
    via the divided-difference chain tensor."""
    h = _as_hermitian(x)
    n = len(dirs)
    if n > EXP_DERIV_MAX_N:
        raise CapExceededError(f"function derivative: order {n} exceeds cap {EXP_DERIV_MAX_N}")
    if h.dim > EXP_DERIV_MAX_DIM:
        raise CapExceededError(f"function derivative: dim {h.dim} exceeds cap {EXP_DERIV_MAX_DIM}")
    dirs_h = _hermitian_dirs(dirs)
    for v in dirs_h:
        if v.shape != (h.dim, h.dim):
            raise ParseError("function derivative: direction shape mismatch")
    dec = h.eig()
    lam = dec.eigenvalues
    tol = cluster_tolerance(np.max(np.abs(lam)) if h.dim else 0.0)

    def dd(chain):
        return complex(g.divided_difference(chain, tol))

    uh = dec.vectors.conj().T
    dirs_eig = [uh @ v @ dec.vectors for v in dirs_h]
    core = derivative_in_eigenbasis(lam, dirs_eig, dd)
    matrix = dec.vectors @ core @ dec.vectors.conj().T
    return MultilinearDerivative(matrix=matrix, order=n, method="dd")


# ---------------------------------------------------------------------------
# Fourier synthesis


def mollifier_weight(t, r):
    """Smooth cutoff: 1 on [-r, r], 0 outside [-r-1, r+1], with a bump-based
    transition whose derivatives all vanish at the seams."""
    t = np.asarray(t, dtype=float)
    u = np.abs(t) - r
    w = np.ones_like(t)
    w[u >= 1.0] = 0.0
    mid = (u > 0.0) & (u < 1.0)
    if np.any(mid):
        um = u[mid]
        with np.errstate(under="ignore"):
            a = np.exp(-1.0 / um)
            b = np.exp(-1.0 / (1.0 - um))
        w[mid] = b / (a + b)
    return w


def _simpson_weights(nnodes, h):
    if nnodes < 3 or nnodes % 2 == 0:
        raise GridError(f"simpson rule needs an odd node count >= 3, got {nnodes}")
    w = np.ones(nnodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


@dataclass
class FourierTable:
    """Sampled frequency representation of a mollified scalar function."""

    g_label: str
    radius: float
    s: np.ndarray
    ghat: np.ndarray
    weights: np.ndarray
    n_max: int
    tail_fraction: float
    recon_residual: float
    dt: float
    nt: int

    def ghat_at(self, s):
        """Nearest-node lookup, mainly for inspection."""
        idx = np.argmin(np.abs(self.s - s))
        return self.ghat[idx]


def _transform_on_grid(g, r, s_grid, s_reach):
    """ghat on s_grid by composite Simpson over the mollified support.

    The t-step is set so the first alias image of the quadrature lands
    beyond s_reach, where the mollified transform is negligible; for a
    compactly supported smooth integrand that makes Simpson spectrally
    accurate rather than h^4-limited.
    """
    width = r + 1.0
    dt_target = np.pi / s_reach
    nt = int(np.ceil(2.0 * width / dt_target)) + 1
    if nt % 2 == 0:
        nt += 1
    t = np.linspace(-width, width, nt)
    wt = _simpson_weights(nt, t[1] - t[0])
    samples = np.asarray(g.eval_derivative(t, 0), dtype=np.complex128)
    samples *= mollifier_weight(t, r) * wt / (2.0 * np.pi)
    # Round-off floor of the quadrature sums; transform values below this
    # are indistinguishable from noise.
    floor = 8.0 * np.finfo(float).eps * float(np.sum(np.abs(samples)))
    ghat = np.empty(len(s_grid), dtype=np.complex128)
    block = 2048
    for lo in range(0, len(s_grid), block):
        sblk = s_grid[lo : lo + block]
        ghat[lo : lo + len(sblk)] = np.exp(-1j * np.outer(sblk, t)) @ samples
    return ghat, t[1] - t[0], nt, floor


def _tail_estimate(s_grid, ghat, floor, n):
    """Estimated mass of |s|^n |ghat(s)| beyond the grid edge.

    Fits the decay envelope of |ghat| over the outer clean region (values
    above the round-off floor), under both a power law A s^-p and a
    stretched exponential A exp(-c sqrt(s)); whichever fits the envelope
    better is integrated in closed form past s_max. Returns None when no
    established decay is visible yet, meaning the grid must grow.
    """
    s_max = s_grid[-1]
    pos = s_grid > 0
    s_pos = s_grid[pos]
    a_pos = np.abs(ghat[pos])
    clean = a_pos >= 10.0 * floor
    if not np.any(clean):
        # everything at round-off level: nothing measurable beyond the grid
        return 0.0
    s_hi = s_pos[clean][-1]
    if s_hi < 0.2 * s_max:
        # decay finished well inside the grid; the edge is pure noise
        return 0.0
    lo = s_hi / 3.0
    window = clean & (s_pos >= lo)
    if np.count_nonzero(window) < 8:
        return None
    sw = s_pos[window]
    aw = a_pos[window]
    # envelope on bins, to ride over oscillation zeros
    nbins = 12
    edges = np.linspace(lo, s_hi, nbins + 1)
    bs, ba = [], []
    for i in range(nbins):
        sel = (sw >= edges[i]) & (sw <= edges[i + 1])
        if np.any(sel):
            j = np.argmax(aw[sel])
            bs.append(sw[sel][j])
            ba.append(aw[sel][j])
    if len(bs) < 5:
        return None
    bs = np.array(bs)
    ba = np.array(ba)
    if ba[-1] > 0.2 * ba[0]:
        return None  # less than a decade of decay: not in the asymptotic regime
    ln_a = np.log(ba)

    best = None
    # power law
    coef = np.polyfit(np.log(bs), ln_a, 1)
    p = -coef[0]
    if p > n + 1:
        resid = float(np.sum((np.polyval(coef, np.log(bs)) - ln_a) ** 2))
        amp = np.exp(coef[1])
        tail = 2.0 * amp * s_max ** (n + 1 - p) / (p - n - 1)
        best = (resid, tail)
    # stretched exponential in sqrt(s)
    coef = np.polyfit(np.sqrt(bs), ln_a, 1)
    c = -coef[0]
    if c > 0:
        resid = float(np.sum((np.polyval(coef, np.sqrt(bs)) - ln_a) ** 2))
        amp = np.exp(coef[1])
        # int_S^inf s^n exp(-c sqrt(s)) ds = 2 Gamma(2n+2, c sqrt(S)) / c^(2n+2)
        incomplete = special.gammaincc(2 * n + 2, c * np.sqrt(s_max)) * special.gamma(2 * n + 2)
        tail = 2.0 * amp * 2.0 * incomplete / c ** (2 * n + 2)
        if best is None or resid < best[0]:
            best = (resid, tail)
    if best is None:
        return None
    return float(best[1])


def fourier_table(g, r, s_max=None, ds=None, n_max=2, tail_tol=FOURIER_TAIL_TOL):
    """Build the frequency table for g mollified to [-r-1, r+1].

    The s-grid step keeps at least eight nodes per oscillation of
    exp(i s lambda) over the ball of radius r (plus the mollifier skirt).
    s_max grows until the estimated not-yet-gridded tail of
    |s|^n_max |ghat| falls below tail_tol of the whole; a cap failure
    raises GridError. Samples below the transform round-off floor are
    stored as zero so they cannot pollute later synthesis quadratures.
    """
    if r <= 0:
        raise ParseError(f"fourier_table: radius must be positive, got {r}")
    width = r + 1.0
    if ds is None:
        ds = np.pi / (4.0 * width)
    fixed_cap = s_max is not None
    target = float(s_max) if fixed_cap else 40.0

    while True:
        m = max(int(np.ceil(target / ds)), 8)
        s_grid = ds * np.arange(-m, m + 1)
        reach = s_grid[-1] + max(40.0, s_grid[-1])
        ghat, dt, nt, floor = _transform_on_grid(g, r, s_grid, reach)
        ghat[np.abs(ghat) < floor] = 0.0
        ws = _simpson_weights(len(s_grid), ds)
        mass = np.abs(s_grid) ** n_max * np.abs(ghat) * ws
        total = float(mass.sum())
        if total == 0.0:
            tail_fraction = 0.0
            break
        tail = _tail_estimate(s_grid, ghat, floor, n_max)
        if tail is not None:
            tail_fraction = tail / total
            if tail_fraction <= tail_tol:
                break
        else:
            tail_fraction = np.inf
        if fixed_cap or s_grid[-1] >= FOURIER_S_MAX_CAP:
            raise GridError(
                f"fourier_table: estimated tail fraction {tail_fraction:.3e} "
                f"above {tail_tol:g} at s_max = {s_grid[-1]:.1f}; grid too small"
            )
        target = 2.0 * s_grid[-1]

    probes = np.linspace(-r, r, 41)
    recon = np.exp(1j * np.outer(probes, s_grid)) @ (ws * ghat)
    gvals = np.asarray(g.eval_derivative(probes, 0), dtype=np.complex128)
    residual = float(np.max(np.abs(recon - gvals)))
    return FourierTable(
        g_label=g.label(),
        radius=float(r),
        s=s_grid,
        ghat=ghat,
        weights=ws,
        n_max=int(n_max),
        tail_fraction=tail_fraction,
        recon_residual=residual,
        dt=float(dt),
        nt=int(nt),
    )


def function_derivative_fourier(table, x, dirs):
    """n-th derivative of x -> g(x) from the frequency table: quadrature of
    ghat(s) (is)^n times the exp derivative at isx over the s-grid."""
    h = _as_hermitian(x)
    n = len(dirs)
    if n > table.n_max:
        raise CapExceededError(
            f"fourier derivative: order {n} exceeds table n_max {table.n_max}"
        )
    dirs_h = _hermitian_dirs(dirs)
    dec = h.eig()
    lam = dec.eigenvalues
    norm = float(np.max(np.abs(lam)))
    if norm > table.radius * (1.0 + 1e-12) + 1e-12:
        raise RadiusError(
            f"fourier derivative: ||x|| = {norm:.6g} outside table radius "
            f"{table.radius:g}"
        )
    z = 1j * table.s
    wn = table.weights * table.ghat * (1j * table.s) ** n

    def dd(chain):
        return complex(np.dot(wn, exp_dd_scaled(chain, z)))

    uh = dec.vectors.conj().T
    dirs_eig = [uh @ v @ dec.vectors for v in dirs_h]
    core = derivative_in_eigenbasis(lam, dirs_eig, dd)
    matrix = dec.vectors @ core @ dec.vectors.conj().T
    return MultilinearDerivative(matrix=matrix, order=n, method="fourier")
