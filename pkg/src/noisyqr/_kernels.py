"""Hot numeric kernels for the Monte Carlo harness and singular values.

Each kernel exists in a loop form that numba compiles and, where the loop
form would be too slow as plain Python, a vectorized numpy fallback. The
aliases at the bottom of the module pick the active implementation from
:mod:`noisyqr._backend`; compiled variants (suffix ``_numba``) are created
whenever numba is importable so the benchmark can time both side by side.

Conventions: trial blocks arrive as C-contiguous float64 arrays whose
leading axis is the trial index; kernels consume pre-drawn noise so their
results do not depend on the backend's random machinery.
"""

from __future__ import annotations

import numpy as np

from ._backend import NUMBA_AVAILABLE, USE_NUMBA

if NUMBA_AVAILABLE:
    from numba import njit as _njit


def _norm_tail_count_loop(y, x_norm, eps):
    # count trials with ||x_norm * e1 + y_row|| > eps
    trials, m = y.shape
    eps2 = eps * eps
    count = 0
    for b in range(trials):
        s = (x_norm + y[b, 0]) ** 2
        for j in range(1, m):
            s += y[b, j] * y[b, j]
        if s > eps2:
            count += 1
    return count


def _norm_tail_count_numpy(y, x_norm, eps):
    z = y.copy()
    z[:, 0] += x_norm
    return int(np.count_nonzero(np.einsum("ij,ij->i", z, z) > eps * eps))


def _ls_residual_count_loop(a_block, y_block, x_norm, ratio):
    """Count trials with ||P_Q y|| <= ratio * ||x + P_perp y||.

    Per trial: Householder-factor the (m, n) matrix, push y through the
    reflectors, and read both norms off the transformed coordinates. The
    canonical x is x_norm times the first complement basis vector, which
    is the (n+1)-th coordinate axis after the reflections.
    """
    trials = a_block.shape[0]
    m = a_block.shape[1]
    n = a_block.shape[2]
    count = 0
    v = np.empty(m)
    for b in range(trials):
        r = a_block[b].copy()
        u = y_block[b].copy()
        for k in range(n):
            norm2 = 0.0
            for i in range(k, m):
                norm2 += r[i, k] * r[i, k]
            normx = np.sqrt(norm2)
            if normx == 0.0:
                continue
            alpha = -normx if r[k, k] > 0.0 else normx
            v[k] = r[k, k] - alpha
            for i in range(k + 1, m):
                v[i] = r[i, k]
            vnorm2 = 0.0
            for i in range(k, m):
                vnorm2 += v[i] * v[i]
            if vnorm2 == 0.0:
                continue
            for j in range(k, n):
                dot = 0.0
                for i in range(k, m):
                    dot += v[i] * r[i, j]
                s = 2.0 * dot / vnorm2
                for i in range(k, m):
                    r[i, j] -= s * v[i]
            dot = 0.0
            for i in range(k, m):
                dot += v[i] * u[i]
            s = 2.0 * dot / vnorm2
            for i in range(k, m):
                u[i] -= s * v[i]
        z1sq = 0.0
        for i in range(n):
            z1sq += u[i] * u[i]
        wsq = (x_norm + u[n]) ** 2
        for i in range(n + 1, m):
            wsq += u[i] * u[i]
        if z1sq <= ratio * ratio * wsq:
            count += 1
    return count


def _ls_residual_count_numpy(a_block, y_block, x_norm, ratio):
    # LAPACK complete QR per trial; same law (the complement direction is
    # arbitrary by rotation invariance), different rounding than the loop.
    trials, _, n = a_block.shape
    ratio2 = ratio * ratio
    count = 0
    for b in range(trials):
        qf, _ = np.linalg.qr(a_block[b], mode="complete")
        y = y_block[b]
        qty = qf[:, :n].T @ y
        w = y - qf[:, :n] @ qty
        z1sq = qty @ qty
        wsq = x_norm * x_norm + 2.0 * x_norm * (qf[:, n] @ w) + w @ w
        if z1sq <= ratio2 * wsq:
            count += 1
    return count


def _chain_batch_source(v_rows, e_block, sigma):
    """Noisy orthogonalization chains, one per trial.

    ``v_rows`` holds the n input columns as rows of an (n, m) array;
    ``e_block`` is (trials, n, m) standard-normal noise. Step i projects
    column i exactly against the computed basis (two classical passes, so
    the projection is orthogonal to working precision), adds sigma times
    the noise row, and normalizes. Condition numbers of the growing stack
    come from LAPACK singular values.

    Returns (final_kappa, min_kappa, mono_bad, excluded_step, a_norm_sums,
    completed) where excluded_step is 1-based (0 means the trial ran to
    completion) and a_norm_sums accumulates realized projection norms over
    completed trials.
    """
    trials = e_block.shape[0]
    n, m = v_rows.shape
    final_kappa = np.zeros(trials)
    min_kappa = np.zeros(trials)
    mono_bad = np.zeros(trials, dtype=np.int64)
    excluded = np.zeros(trials, dtype=np.int64)
    a_norm_sums = np.zeros(n)
    completed = 0
    qhat = np.empty((n, m))
    a_norms = np.empty(n)
    for b in range(trials):
        ok = True
        prev = 1.0
        kmin = np.inf
        bad = 0
        for i in range(n):
            a = v_rows[i].copy()
            for _ in range(2):
                if i > 0:
                    coef = qhat[:i] @ a
                    for j in range(i):
                        a = a - coef[j] * qhat[j]
            anorm = np.sqrt(a @ a)
            if anorm < 1e-13:
                excluded[b] = i + 1
                ok = False
                break
            a_norms[i] = anorm
            if sigma > 0.0:
                q = a + sigma * e_block[b, i]
            else:
                q = a
            qhat[i] = q / np.sqrt(q @ q)
            s = np.linalg.svd(qhat[: i + 1], full_matrices=False)[1]
            kap = s[0] / s[i]
            if kap < kmin:
                kmin = kap
            if kap < prev * (1.0 - 1e-10):
                bad += 1
            prev = kap
        if ok:
            final_kappa[b] = prev
            min_kappa[b] = kmin
            mono_bad[b] = bad
            for i in range(n):
                a_norm_sums[i] += a_norms[i]
            completed += 1
    return final_kappa, min_kappa, mono_bad, excluded, a_norm_sums, completed


def _jacobi_singular_values_source(rows):
    """One-sided Jacobi on the rows of an (n, m) array (columns of the
    original matrix). Rotations drive every pairwise inner product to
    zero; the singular values are the final row norms, high relative
    accuracy included. Returns them sorted descending."""
    a = rows.copy()
    n, m = a.shape
    if n == 0:
        return np.empty(0)
    tol = 1e-15
    for _ in range(100):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p] @ a[q]
                app = a[p] @ a[p]
                aqq = a[q] @ a[q]
                denom = np.sqrt(app * aqq)
                if denom == 0.0 or abs(apq) <= tol * denom:
                    continue
                rel = abs(apq) / denom
                if rel > off:
                    off = rel
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for i in range(m):
                    tmp = a[p, i]
                    a[p, i] = c * tmp - s * a[q, i]
                    a[q, i] = s * tmp + c * a[q, i]
        if off <= tol:
            break
    sv = np.empty(n)
    for j in range(n):
        sv[j] = np.sqrt(a[j] @ a[j])
    return np.sort(sv)[::-1].copy()


if NUMBA_AVAILABLE:
    norm_tail_count_numba = _njit(cache=True, nogil=True)(_norm_tail_count_loop)
    ls_residual_count_numba = _njit(cache=True, nogil=True)(_ls_residual_count_loop)
    chain_batch_numba = _njit(cache=True, nogil=True)(_chain_batch_source)
    jacobi_singular_values_numba = _njit(cache=True, nogil=True)(
        _jacobi_singular_values_source
    )

if USE_NUMBA:
    norm_tail_count = norm_tail_count_numba
    ls_residual_count = ls_residual_count_numba
    chain_batch = chain_batch_numba
    jacobi_singular_values = jacobi_singular_values_numba
else:
    norm_tail_count = _norm_tail_count_numpy
    ls_residual_count = _ls_residual_count_numpy
    chain_batch = _chain_batch_source
    jacobi_singular_values = _jacobi_singular_values_source
