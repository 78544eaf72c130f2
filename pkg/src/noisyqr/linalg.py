"""Dense real linear algebra for the condition-number experiments.

Factorizations are hand-rolled so the experiments measure exactly the
algorithms under study: ``householder_qr`` (the reference factorization,
orthogonal to machine precision), ``mgs_qr`` (modified Gram-Schmidt, whose
loss of orthogonality motivates the noise model), and one-sided Jacobi
singular values (high relative accuracy at desk scale, LAPACK beyond 64
columns). Matrices are plain 2-D float64 numpy arrays, validated at the
boundaries; the CSV exchange format is a ``rows,cols`` header line
followed by one comma-separated row per line at 17 significant digits.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DomainError, MatrixFormatError, PreconditionError, RankDeficiencyError

RANK_TOL = 1e-10
ORTHO_TOL = 1e-8
_JACOBI_MAX_COLS = 64


class QrFactors(NamedTuple):
    """Thin factorization a = q @ r with orthonormal q and upper-triangular
    r whose diagonal is nonnegative (sign convention)."""

    q: np.ndarray
    r: np.ndarray


def _check_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DomainError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def _check_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise DomainError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr


def _householder_reduce(a: np.ndarray):
    """Reduce a (m, n) to upper-triangular form; returns (r, reflectors).

    ``reflectors[k:, k]`` holds the k-th Householder vector (unnormalized);
    a zero column marks an identity step.
    """
    m, n = a.shape
    r = a.copy()
    vs = np.zeros((m, n))
    for k in range(n):
        x = r[k:, k]
        normx = float(np.linalg.norm(x))
        if normx == 0.0:
            continue
        alpha = -normx if x[0] > 0.0 else normx
        v = x.copy()
        v[0] -= alpha
        vnorm2 = float(v @ v)
        if vnorm2 == 0.0:
            continue
        vs[k:, k] = v
        sub = r[k:, k:]
        sub -= np.outer(v, (2.0 / vnorm2) * (v @ sub))
        r[k + 1 :, k] = 0.0
        r[k, k] = alpha
    return r, vs


def _apply_reflectors(vs: np.ndarray, x: np.ndarray) -> np.ndarray:
    # y = H_1 ... H_n x, the orthogonal factor applied to x (vector or matrix)
    y = np.array(x, dtype=np.float64, copy=True)
    n = vs.shape[1]
    for k in range(n - 1, -1, -1):
        v = vs[k:, k]
        vnorm2 = float(v @ v)
        if vnorm2 == 0.0:
            continue
        if y.ndim == 1:
            y[k:] -= (2.0 * float(v @ y[k:]) / vnorm2) * v
        else:
            y[k:] -= np.outer(v, (2.0 / vnorm2) * (v @ y[k:]))
    return y


def _rank_check(r: np.ndarray, what: str) -> None:
    sv = singular_values(r)
    if sv.size == 0:
        return
    if sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficiencyError(
            f"{what}: sigma_min = {sv[-1]:.3e} <= {RANK_TOL:g} * sigma_max = "
            f"{RANK_TOL * sv[0]:.3e}"
        )


def householder_qr(a) -> QrFactors:
    """Thin QR by Householder reflections, diag(r) >= 0.

    Raises RankDeficiencyError when sigma_min(r) <= 1e-10 * sigma_max(r).
    """
    a = _check_matrix(a)
    m, n = a.shape
    if m < n:
        raise DomainError(f"householder_qr requires rows >= cols, got {m} x {n}")
    if n == 0:
        raise DomainError("householder_qr requires at least one column")
    red, vs = _householder_reduce(a)
    r = np.triu(red[:n, :])
    q = _apply_reflectors(vs, np.eye(m)[:, :n])
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    r = signs[:, None] * r
    q = q * signs[None, :]
    _rank_check(r, "householder_qr")
    return QrFactors(q, r)


def mgs_qr(a) -> QrFactors:
    """Thin QR by modified Gram-Schmidt.

    Same contract as householder_qr, but the orthogonality of q degrades
    with the conditioning of the input; that degradation is the point of
    providing it.
    """
    a = _check_matrix(a)
    m, n = a.shape
    if m < n:
        raise DomainError(f"mgs_qr requires rows >= cols, got {m} x {n}")
    if n == 0:
        raise DomainError("mgs_qr requires at least one column")
    q = a.copy()
    r = np.zeros((n, n))
    for j in range(n):
        for i in range(j):
            r[i, j] = float(q[:, i] @ q[:, j])
            q[:, j] -= r[i, j] * q[:, i]
        r[j, j] = float(np.linalg.norm(q[:, j]))
        if r[j, j] == 0.0:
            raise RankDeficiencyError(f"mgs_qr: column {j} is dependent on its predecessors")
        q[:, j] /= r[j, j]
    _rank_check(r, "mgs_qr")
    return QrFactors(q, r)


def singular_values(a) -> np.ndarray:
    """Singular values, sorted descending.

    One-sided Jacobi up to 64 columns (after orienting the matrix tall),
    LAPACK beyond that.
    """
    a = _check_matrix(a)
    if min(a.shape) == 0:
        return np.empty(0)
    if a.shape[0] < a.shape[1]:
        a = a.T
    if a.shape[1] <= _JACOBI_MAX_COLS:
        rows = np.ascontiguousarray(a.T)
        return _kernels.jacobi_singular_values(rows)
    return np.linalg.svd(a, compute_uv=False)


def cond(a) -> float:
    """Spectral condition number sigma_max / sigma_min."""
    sv = singular_values(a)
    if sv.size == 0:
        raise DomainError("cond of an empty matrix is undefined")
    if sv[0] == 0.0 or sv[-1] <= RANK_TOL * sv[0]:
        raise RankDeficiencyError(
            f"cond: matrix is singular to working precision (sigma_min = {sv[-1]:.3e})"
        )
    return float(sv[0] / sv[-1])


def _check_orthonormal(q: np.ndarray, tol: float = ORTHO_TOL) -> None:
    if q.shape[1] == 0:
        return
    gram = q.T @ q
    dev = float(np.max(np.abs(gram - np.eye(q.shape[1]))))
    if dev > tol:
        raise PreconditionError(
            f"columns are not orthonormal: max |Q^T Q - I| = {dev:.3e} > {tol:g}"
        )


def project_onto(q, v) -> np.ndarray:
    """Orthogonal projection of v onto the span of the orthonormal columns q."""
    q = _check_matrix(q, "q")
    v = _check_vector(v, "v")
    if q.shape[0] != v.shape[0]:
        raise DomainError(f"dimension mismatch: q is {q.shape}, v has length {v.shape[0]}")
    _check_orthonormal(q)
    if q.shape[1] == 0:
        return np.zeros_like(v)
    return q @ (q.T @ v)


def project_perp(q, v) -> np.ndarray:
    """Projection of v onto the orthogonal complement of span(q)."""
    return _check_vector(v, "v") - project_onto(q, v)


def orthonormal_complement(q) -> np.ndarray:
    """An orthonormal basis of the complement of span(q), as an m x (m-n)
    matrix; m = n yields a matrix with zero columns.

    Built from the trailing columns of the full Householder orthogonal
    factor of q, so the result is orthogonal by construction.
    """
    q = _check_matrix(q, "q")
    m, n = q.shape
    if m < n:
        raise DomainError(f"complement requires rows >= cols, got {m} x {n}")
    _check_orthonormal(q)
    if m == n:
        return np.zeros((m, 0))
    if n == 0:
        return np.eye(m)
    _, vs = _householder_reduce(q)
    return _apply_reflectors(vs, np.eye(m)[:, n:])


def ls_residual(b, c) -> tuple[np.ndarray, np.ndarray]:
    """Least squares min_y ||c - b y||: returns (y, r) with r = c - b y.

    Solved through householder_qr, so b^T r vanishes to working precision;
    rank deficiency propagates from the factorization.
    """
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    if b.shape[0] != c.shape[0]:
        raise DomainError(f"dimension mismatch: b is {b.shape}, c has length {c.shape[0]}")
    q, r = householder_qr(b)
    qtc = q.T @ c
    n = b.shape[1]
    y = np.zeros(n)
    for i in range(n - 1, -1, -1):
        y[i] = (qtc[i] - float(r[i, i + 1 :] @ y[i + 1 :])) / r[i, i]
    return y, c - b @ y


def append_column(b, c, gamma: float) -> np.ndarray:
    """The m x (n+1) matrix [b, gamma * c].

    gamma = 0 is allowed; the result is rank deficient by construction and
    downstream operations flag it.
    """
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    gamma = float(gamma)
    if not np.isfinite(gamma):
        raise DomainError(f"gamma must be finite, got {gamma}")
    if b.shape[0] != c.shape[0]:
        raise DomainError(f"dimension mismatch: b is {b.shape}, c has length {c.shape[0]}")
    return np.column_stack([b, gamma * c])


# ---------------------------------------------------------------------------
# CSV exchange format
# ---------------------------------------------------------------------------


def save_matrix_csv(path, a) -> None:
    """Write a matrix as 'rows,cols' then one comma-separated row per line.

    Values use 17 significant digits, enough for exact float64 round-trip.
    """
    a = _check_matrix(a)
    lines = [f"{a.shape[0]},{a.shape[1]}"]
    for i in range(a.shape[0]):
        lines.append(",".join(f"{v:.17g}" for v in a[i]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_matrix_csv(path) -> np.ndarray:
    """Read the format written by save_matrix_csv.

    Errors carry the file name and the 1-based offending line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MatrixFormatError(f"{path}: cannot read: {exc}") from exc
    lines = text.splitlines()
    if not lines:
        raise MatrixFormatError(f"{path}:1: empty file, expected a rows,cols header")
    head = lines[0].split(",")
    if len(head) != 2:
        raise MatrixFormatError(f"{path}:1: header must be 'rows,cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MatrixFormatError(f"{path}:1: header must be two integers, got {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"{path}:1: rows and cols must be >= 1, got {rows},{cols}")
    body = [ln for ln in lines[1:] if ln.strip() != ""]
    if len(body) != rows:
        raise MatrixFormatError(
            f"{path}:{len(lines)}: expected {rows} data rows, found {len(body)}"
        )
    out = np.empty((rows, cols))
    for i, line in enumerate(body):
        parts = line.split(",")
        lineno = i + 2
        if len(parts) != cols:
            raise MatrixFormatError(
                f"{path}:{lineno}: expected {cols} values, found {len(parts)}"
            )
        try:
            out[i] = [float(p) for p in parts]
        except ValueError as exc:
            raise MatrixFormatError(f"{path}:{lineno}: non-numeric value in {line!r}") from exc
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError(f"{path}: matrix contains non-finite values")
    return out


def load_vector_csv(path) -> np.ndarray:
    """Read a one-column (or one-row) matrix file as a vector."""
    a = load_matrix_csv(path)
    if 1 not in a.shape:
        raise MatrixFormatError(f"{path}: expected a vector, got shape {a.shape}")
    return a.ravel()
