"""Dense field-generic matrix arithmetic and hermitian spectral calculus.

Matrices are plain numpy arrays: ``float64`` for the real field,
``complex128`` for the complex one.  Conjugation is the identity on the
real field and flips the sign of the imaginary part on the complex one,
so a single code path written with ``conj``/``conjugate-transpose``
serves both fields.

The eigensolver is a self-contained cyclic Jacobi iteration with unitary
2x2 rotations.  It is unconditionally stable on hermitian input, needs no
external LAPACK behaviour to be pinned down, and is deterministic: the
same input bytes produce the same decomposition on every platform.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    IsotropicPivot,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    ParseError,
    RankDeficient,
    Singular,
)

REAL = "real"
COMPLEX = "complex"

# Skip-thresholds that make orthonormalization and canonicalization exact
# fixed points on their own output (needed for bit-for-bit idempotence).
_SNAP = 1e-13

_JACOBI_SWEEPS = 30


@dataclass(frozen=True)
class Tolerance:
    """Numeric tolerance bundle threaded through every operation.

    tau_abs: absolute floor for pivots, positivity and meet decisions.
    tau_rel: relative tolerance for residual checks against norms.
    jacobi_stop: relative off-diagonal mass at which the eigensolver stops.
    """

    tau_abs: float = 1e-9
    tau_rel: float = 1e-7
    jacobi_stop: float = 1e-13

    def __post_init__(self) -> None:
        if not (self.tau_abs > 0 and self.tau_rel > 0 and self.jacobi_stop > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerance()


def field_of(a: np.ndarray) -> str:
    return COMPLEX if np.iscomplexobj(a) else REAL


def dtype_of(field: str):
    if field == REAL:
        return np.float64
    if field == COMPLEX:
        return np.complex128
    raise ValueError(f"unknown field {field!r}")


def dag(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose (plain transpose on the real field)."""
    return a.conj().T


def fro(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def symmetrize(a: np.ndarray) -> np.ndarray:
    """(A + A*)/2; the hermitian part, used to stop hermiticity drift."""
    return (a + dag(a)) / 2.0


def hermitian_residual(a: np.ndarray) -> float:
    return fro(a - dag(a))


def is_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return hermitian_residual(a) <= tol.tau_abs + tol.tau_rel * fro(a)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (real, ascending) and a unitary eigenbasis Q with
    A = Q diag(eigenvalues) Q*."""

    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Assemble Q diag(values) Q*, re-symmetrized."""
        q = self.eigenbasis
        return symmetrize((q * values) @ dag(q))


def eig_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> SpectralDecomposition:
    """Full eigendecomposition of a hermitian matrix by cyclic Jacobi.

    Sweeps rotate every off-diagonal pair (p, q) with a unitary 2x2
    rotation chosen to zero A[p, q]; in the complex case the rotation
    carries the phase of A[p, q].  Iteration stops once the off-diagonal
    Frobenius mass falls below ``jacobi_stop * ||A||_F``; the sweep budget
    is 30, after which NoConvergence is raised (unreachable for genuine
    hermitian input, where convergence is quadratic).

    Eigenvalues are returned ascending; within a degenerate cluster the
    eigenvector order is whatever the stable sort of the Jacobi output
    gives, and no caller may depend on the intra-cluster order.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    norm_a = fro(a)
    if hermitian_residual(a) > tol.tau_abs + tol.tau_rel * norm_a:
        raise NotHermitian(f"symmetry residual {hermitian_residual(a):.3e} exceeds tolerance")

    n = a.shape[0]
    w = symmetrize(np.array(a))
    complex_case = np.iscomplexobj(w)
    q = np.eye(n, dtype=w.dtype)
    if n == 1 or norm_a == 0.0:
        vals = np.real(np.diag(w)).copy()
        return SpectralDecomposition(vals, q)

    stop = tol.jacobi_stop * norm_a
    for _ in range(_JACOBI_SWEEPS):
        off = fro(w - np.diag(np.diag(w)))
        if off < stop:
            break
        for p in range(n - 1):
            for r in range(p + 1, n):
                b = w[p, r]
                absb = abs(b)
                if absb == 0.0:
                    continue
                phase = b / absb if complex_case else (1.0 if b > 0 else -1.0)
                app = w[p, p].real
                arr = w[r, r].real
                tau = (arr - app) / (2.0 * absb)
                if abs(tau) > 1e150:
                    t = 0.5 / tau  # asymptotic root; tau*tau would overflow
                elif tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                # w <- U* w U with U[p,p]=U[r,r]=c, U[p,r]=s*phase, U[r,p]=-s*conj(phase)
                col_p = w[:, p].copy()
                col_r = w[:, r].copy()
                w[:, p] = c * col_p - np.conj(sp) * col_r
                w[:, r] = sp * col_p + c * col_r
                row_p = w[p, :].copy()
                row_r = w[r, :].copy()
                w[p, :] = c * row_p - sp * row_r
                w[r, :] = np.conj(sp) * row_p + c * row_r
                w[p, r] = 0.0
                w[r, p] = 0.0
                w[p, p] = w[p, p].real
                w[r, r] = w[r, r].real
                qcol_p = q[:, p].copy()
                qcol_r = q[:, r].copy()
                q[:, p] = c * qcol_p - np.conj(sp) * qcol_r
                q[:, r] = sp * qcol_p + c * qcol_r
    else:
        raise NoConvergence(f"off-diagonal mass still {off:.3e} after {_JACOBI_SWEEPS} sweeps")

    vals = np.real(np.diag(w)).copy()
    order = np.argsort(vals, kind="stable")
    return SpectralDecomposition(vals[order], q[:, order])


_SPECTRAL_FUNCTIONS = {
    "sqrt": np.sqrt,
    "square": np.square,
    "inverse": lambda x: 1.0 / x,
    "inverse_sqrt": lambda x: 1.0 / np.sqrt(x),
    "exp": np.exp,
    "log": np.log,
}
_NEEDS_POSITIVITY = {"sqrt", "inverse", "inverse_sqrt", "log"}


def spectral_map(a: np.ndarray, func: str, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Apply a scalar function to a hermitian matrix through its spectrum.

    ``sqrt`` returns the unique positive-definite square root.  Functions
    needing positivity (sqrt, log, inverse, inverse_sqrt) raise
    NotPositiveDefinite when the smallest eigenvalue is <= tau_abs.  The
    result is re-symmetrized so hermiticity cannot drift through long
    chains of loop multiplications.
    """
    if func not in _SPECTRAL_FUNCTIONS:
        raise ValueError(f"unknown spectral function {func!r}")
    dec = eig_hermitian(a, tol)
    if func in _NEEDS_POSITIVITY and dec.eigenvalues[0] <= tol.tau_abs:
        raise NotPositiveDefinite(
            f"{func}: smallest eigenvalue {dec.eigenvalues[0]:.3e} <= {tol.tau_abs:.1e}"
        )
    return dec.apply(_SPECTRAL_FUNCTIONS[func](dec.eigenvalues))


def solve_linear(a: np.ndarray, b: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Solve A X = B by Gaussian elimination with partial pivoting.

    Raises Singular as soon as a pivot magnitude falls below tau_abs,
    which doubles as the condition guard for the well-posedness
    precondition.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"coefficient matrix must be square, got {a.shape}")
    n = a.shape[0]
    vector = b.ndim == 1
    rhs = b.reshape(n, -1) if vector else b
    if rhs.shape[0] != n:
        raise DimensionMismatch(f"rhs rows {rhs.shape[0]} != {n}")
    dtype = np.result_type(a.dtype, rhs.dtype, np.float64)
    m = np.array(a, dtype=dtype)
    x = np.array(rhs, dtype=dtype)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[piv, k]) <= tol.tau_abs:
            raise Singular(f"pivot {abs(m[piv, k]):.3e} at column {k}")
        if piv != k:
            m[[k, piv], :] = m[[piv, k], :]
            x[[k, piv], :] = x[[piv, k], :]
        factors = m[k + 1 :, k] / m[k, k]
        m[k + 1 :, k:] -= np.outer(factors, m[k, k:])
        x[k + 1 :, :] -= np.outer(factors, x[k, :])
    for k in range(n - 1, -1, -1):
        x[k, :] = (x[k, :] - m[k, k + 1 :] @ x[k + 1 :, :]) / m[k, k]
    return x[:, 0] if vector else x


def orthonormalize(v: np.ndarray, form: np.ndarray | None = None, tol: Tolerance = DEFAULT_TOL):
    """Gram-Schmidt on the columns of ``v``, order-preserving.

    Without a form the result U has U* U = I and the same span; with a
    diagonal +-1 form J the result satisfies u_i* J u_j = sign_i delta_ij
    and the pair ``(U, signs)`` is returned.

    Projection and normalization steps within _SNAP of a no-op are
    skipped, which makes the function an exact fixed point on its own
    output; canonical frames therefore survive re-canonicalization
    bit-for-bit.

    Raises RankDeficient when a residual column collapses, IsotropicPivot
    when a form norm is below tau_abs in magnitude.
    """
    n, k = v.shape
    out = np.array(v, dtype=np.result_type(v.dtype, np.float64))
    if form is not None and form.shape != (n, n):
        raise DimensionMismatch(f"form shape {form.shape} does not match columns of length {n}")
    signs = np.zeros(k)
    for j in range(k):
        col = out[:, j]
        vn = float(np.linalg.norm(col))
        for i in range(j):
            if form is None:
                coef = np.vdot(out[:, i], col)
            else:
                coef = signs[i] * np.vdot(out[:, i], form @ col)
            if abs(coef) > _SNAP * vn:
                col = col - coef * out[:, i]
        if form is None:
            nrm = float(np.linalg.norm(col))
            if nrm <= tol.tau_abs * max(1.0, vn):
                raise RankDeficient(f"column {j} is dependent (residual {nrm:.3e})")
            if abs(nrm - 1.0) > _SNAP:
                col = col / nrm
        else:
            fn = float(np.real(np.vdot(col, form @ col)))
            if abs(fn) <= tol.tau_abs:
                raise IsotropicPivot(f"column {j} has form norm {fn:.3e}")
            signs[j] = 1.0 if fn > 0 else -1.0
            scale = math.sqrt(abs(fn))
            if abs(scale - 1.0) > _SNAP:
                col = col / scale
        out[:, j] = col
    if form is None:
        return out
    return out, signs


# ---------------------------------------------------------------------------
# Matrix text format (CLI interchange)
#
#   rows cols field
#   row-major entries, one row per line
#
# Complex entries are written a+bi / a-bi with no spaces.  Scalars use 17
# significant decimal digits, which round-trips float64 bit-exactly.
# ---------------------------------------------------------------------------

_COMPLEX_ENTRY = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i$"
)


def format_scalar(x, field: str) -> str:
    if field == REAL:
        return format(float(np.real(x)), ".17g")
    rp = format(float(np.real(x)), ".17g")
    ip = float(np.imag(x))
    sign = "+" if (ip >= 0 or math.isnan(ip)) else "-"
    return f"{rp}{sign}{format(abs(ip), '.17g')}i"


def parse_scalar(token: str, field: str):
    try:
        if field == REAL:
            return float(token)
        if token.endswith("i"):
            m = _COMPLEX_ENTRY.match(token)
            if m is None:
                raise ValueError(token)
            return complex(float(m.group("re")), float(m.group("im")))
        return complex(float(token), 0.0)
    except ValueError as exc:
        raise ParseError(f"bad {field} entry {token!r}") from exc


def write_matrix_text(a: np.ndarray) -> str:
    field = field_of(a)
    rows, cols = a.shape
    lines = [f"{rows} {cols} {field}"]
    for i in range(rows):
        lines.append(" ".join(format_scalar(a[i, j], field) for j in range(cols)))
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> np.ndarray:
    lines = text.strip().splitlines()
    if not lines:
        raise ParseError("empty matrix text")
    header = lines[0].split()
    if len(header) != 3:
        raise ParseError(f"bad header {lines[0]!r}; expected 'rows cols field'")
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ParseError(f"bad dimensions in header {lines[0]!r}") from exc
    field = header[2]
    if field not in (REAL, COMPLEX):
        raise ParseError(f"unknown field {field!r}")
    if rows < 1 or cols < 1:
        raise ParseError("matrix dimensions must be >= 1")
    tokens = " ".join(lines[1:]).split()
    if len(tokens) != rows * cols:
        raise ParseError(f"expected {rows * cols} entries, found {len(tokens)}")
    data = [parse_scalar(t, field) for t in tokens]
    return np.array(data, dtype=dtype_of(field)).reshape(rows, cols)
