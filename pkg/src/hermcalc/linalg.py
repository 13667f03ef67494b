"""Dense complex matrices: validation, Hermitian types, eigensolver, norms, JSON I/O.

The eigensolver is a cyclic Jacobi iteration with complex rotations. It is
deliberately dependency-light and deterministic: fixed pivot order, fixed
stopping rule, no tie-breaking randomness. Matrices here are small
(d <= 64), where Jacobi is both robust and accurate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ParseError

JACOBI_SWEEP_CAP = 100
JACOBI_OFF_TOL = 1e-14
HERMITIAN_REJECT_TOL = 1e-8


def validate_matrix(matrix, name="matrix"):
    """Coerce to a finite square complex128 ndarray, copying the input."""
    arr = np.array(matrix, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ParseError(f"{name}: expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ParseError(f"{name}: entries must be finite (no NaN/Inf)")
    return arr


def as_array(x):
    """Unwrap HermitianMatrix to its ndarray, validate anything else."""
    if isinstance(x, HermitianMatrix):
        return x.array
    return validate_matrix(x)


def frobenius(m):
    return float(np.linalg.norm(m))


class HermitianMatrix:
    """A validated Hermitian matrix.

    Construction symmetrizes the input, (M + M*) / 2, and records the size
    of the correction. Inputs whose anti-Hermitian part exceeds
    1e-8 * ||M||_F are rejected rather than silently repaired.
    """

    __slots__ = ("array", "dim", "defect", "_eig")

    def __init__(self, matrix, reject_tol=HERMITIAN_REJECT_TOL):
        arr = validate_matrix(matrix)
        anti = arr - arr.conj().T
        scale = frobenius(arr)
        defect = 0.5 * frobenius(anti)
        if scale > 0 and 2.0 * defect > reject_tol * scale:
            raise ParseError(
                f"matrix is not Hermitian: ||M - M*|| = {2 * defect:.3e} "
                f"exceeds {reject_tol:g} * ||M|| = {reject_tol * scale:.3e}"
            )
        self.array = 0.5 * (arr + arr.conj().T)
        self.dim = arr.shape[0]
        self.defect = defect
        self._eig = None

    def eig(self):
        """Eigendecomposition, computed once and cached."""
        if self._eig is None:
            self._eig = eig(self.array)
        return self._eig


@dataclass
class Eigendecomposition:
    """Ascending real eigenvalues and a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        v = self.vectors
        return (v * self.eigenvalues) @ v.conj().T

    def unitary_defect(self):
        v = self.vectors
        d = v.shape[0]
        return float(np.max(np.abs(v.conj().T @ v - np.eye(d))))

    def reconstruction_error(self, source):
        return float(np.max(np.abs(self.reconstruct() - as_array(source))))


def _off_diagonal_norm(a):
    # Summed directly over off-diagonal entries; the subtract-the-diagonal
    # shortcut cancels catastrophically near convergence.
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eig(x):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.

    Pivots run over the strict upper triangle in row-major order. Each
    rotation is a unitary plane rotation built from the phase of the pivot
    entry and the classic stable tangent formula. Stops when the
    off-diagonal Frobenius norm falls below 1e-14 * ||A||_F; raises
    ConvergenceError after 100 sweeps.
    """
    if isinstance(x, HermitianMatrix):
        a = x.array.copy()
    else:
        a = HermitianMatrix(x).array.copy()
    d = a.shape[0]
    if d == 1:
        return Eigendecomposition(
            eigenvalues=np.array([a[0, 0].real]),
            vectors=np.eye(1, dtype=np.complex128),
        )

    target = JACOBI_OFF_TOL * max(frobenius(a), np.finfo(float).tiny)
    skip = target / d
    u = np.eye(d, dtype=np.complex128)

    converged = False
    for _ in range(JACOBI_SWEEP_CAP):
        if _off_diagonal_norm(a) <= target:
            converged = True
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                phase = apq / mag
                alpha = a[p, p].real
                beta = a[q, q].real
                # Annihilation tangent: the small-magnitude root of
                # t^2 - 2 tau t - 1 = 0 for this rotation layout.
                tau = (beta - alpha) / (2.0 * mag)
                if tau >= 0:
                    t = -1.0 / (tau + np.hypot(1.0, tau))
                else:
                    t = 1.0 / (-tau + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                sp = s * phase.conjugate()
                # Column update A <- A V, with V the plane rotation
                # [[c, -s], [s conj(phase), c conj(phase)]] on (p, q).
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + sp * col_q
                a[:, q] = -s * col_p + c * phase.conjugate() * col_q
                # Row update A <- V* A.
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + s * phase * row_q
                a[q, :] = -s * row_p + c * phase * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                col_p = u[:, p].copy()
                col_q = u[:, q].copy()
                u[:, p] = c * col_p + sp * col_q
                u[:, q] = -s * col_p + c * phase.conjugate() * col_q
    if not converged and _off_diagonal_norm(a) > target:
        raise ConvergenceError(
            f"jacobi eigensolver did not reach off-diagonal tolerance "
            f"{target:.3e} within {JACOBI_SWEEP_CAP} sweeps (dim {d})"
        )

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return Eigendecomposition(eigenvalues=w[order], vectors=u[:, order])


def op_norm(m):
    """Operator (spectral) norm via the largest eigenvalue of M* M."""
    arr = validate_matrix(m)
    if arr.shape[0] == 1:
        return float(abs(arr[0, 0]))
    h = arr.conj().T @ arr
    w = eig(0.5 * (h + h.conj().T)).eigenvalues
    return float(np.sqrt(max(w[-1], 0.0)))


def matmul(matrices):
    """Left-to-right product of a nonempty sequence of conformable matrices."""
    mats = [np.asarray(m, dtype=np.complex128) for m in matrices]
    if not mats:
        raise ParseError("matmul: empty sequence")
    out = mats[0]
    for m in mats[1:]:
        if out.shape[1] != m.shape[0]:
            raise ParseError(f"matmul: dimension mismatch {out.shape} @ {m.shape}")
        out = out @ m
    return out


# ---------------------------------------------------------------------------
# JSON wire format: {"dim": d, "entries": [[re, im], ...]} row-major, d*d pairs.


def matrix_to_dict(arr, meta=None):
    arr = validate_matrix(arr)
    doc = {
        "dim": int(arr.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in arr.reshape(-1)],
    }
    if meta:
        doc["meta"] = meta
    return doc


def matrix_from_dict(doc, name="matrix"):
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise ParseError(f"{name}: expected an object with 'dim' and 'entries'")
    try:
        d = int(doc["dim"])
    except (TypeError, ValueError):
        raise ParseError(f"{name}: 'dim' must be an integer") from None
    entries = doc["entries"]
    if d < 1:
        raise ParseError(f"{name}: 'dim' must be >= 1, got {d}")
    if not isinstance(entries, list) or len(entries) != d * d:
        raise ParseError(
            f"{name}: expected {d * d} [re, im] pairs, got "
            f"{len(entries) if isinstance(entries, list) else type(entries).__name__}"
        )
    flat = np.empty(d * d, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError(f"{name}: entry {k} is not a [re, im] pair")
        try:
            flat[k] = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError):
            raise ParseError(f"{name}: entry {k} is not numeric") from None
    return validate_matrix(flat.reshape(d, d), name=name)


def matrix_to_json(arr, meta=None):
    return json.dumps(matrix_to_dict(arr, meta), sort_keys=True, indent=1) + "\n"


def load_matrix(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read matrix file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    return matrix_from_dict(doc, name=str(path))


def save_matrix(arr, path, meta=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(matrix_to_json(arr, meta))
