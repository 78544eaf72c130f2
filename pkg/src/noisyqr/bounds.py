"""Condition-number growth bounds for column-appended matrices.

Each bound operation returns a :class:`BoundReport` carrying the bound,
the directly computed quantity it bounds (when the instance allows it),
the scalar inputs that entered the formula, and a flag telling whether the
hypotheses held. Pole cases (zero residual, nonpositive denominators)
produce a report with ``preconditions_met=False`` and an infinite bound
instead of raising, so random sweeps never abort.

The probabilistic results reduce to the noncentral-F survival function:
the residual norm of a noisily orthogonalized, normalized column exceeds
1/sqrt(1 + (e1/e2)^2) with probability

    SF_{F'(m-n, n; ||X||^2 / sigma^2)}( n e2^2 / ((m-n) e1^2) )

with the squared epsilon ratio; the chi-squared laws in the derivation
apply to squared norms, and sigma cancels inside the ratio. The growth
factor that goes with that threshold is g(e1, e2) = e1/e2 +
sqrt(1 + (e1/e2)^2), the exact value of (1 + sqrt(1 - r^2))/r at the
threshold. The errata-report subcommand prints these next to the commonly
printed variants they replace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError, RankDeficiencyError
from .linalg import (
    _check_matrix,
    _check_vector,
    append_column,
    cond,
    householder_qr,
    ls_residual,
    singular_values,
)
from .specfun import TailProbability, noncentral_f_sf

_UNIT_TOL = 1e-12
_PERP_TOL = 1e-10

_CSV_COLUMNS = (
    "op",
    "direction",
    "preconditions_met",
    "bound_value",
    "actual_value",
    "gamma",
    "sigma_max",
    "sigma_min",
    "kappa_b",
    "xy_norm",
    "bty_norm",
    "c_norm",
    "r_norm",
    "kappa_qc",
    "eps",
    "note",
)


@dataclass(frozen=True)
class BoundReport:
    """One evaluated bound with its audit trail.

    ``direction`` is "upper" (actual <= bound) or "lower" (actual >=
    bound). ``inputs`` holds the scalars the formula consumed, keyed by
    the column names used in the flat CSV serialization.
    """

    op: str
    bound_value: float
    actual_value: float | None
    inputs: dict[str, float]
    preconditions_met: bool
    direction: str = "upper"
    note: str = ""

    @staticmethod
    def csv_header() -> str:
        return ",".join(_CSV_COLUMNS)

    def to_csv_row(self) -> str:
        cells = []
        for col in _CSV_COLUMNS:
            if col == "op":
                cells.append(self.op)
            elif col == "direction":
                cells.append(self.direction)
            elif col == "preconditions_met":
                cells.append("1" if self.preconditions_met else "0")
            elif col == "bound_value":
                cells.append(repr(float(self.bound_value)))
            elif col == "actual_value":
                cells.append("" if self.actual_value is None else repr(float(self.actual_value)))
            elif col == "note":
                cells.append(self.note.replace(",", ";"))
            else:
                v = self.inputs.get(col)
                cells.append("" if v is None else repr(float(v)))
        return ",".join(cells)

    def to_text(self) -> str:
        lines = [f"[{self.op}]"]
        rel = "<=" if self.direction == "upper" else ">="
        lines.append(f"  bound ({self.direction}): actual {rel} {self.bound_value!r}")
        if self.actual_value is not None:
            lines.append(f"  actual: {self.actual_value!r}")
        lines.append(f"  preconditions_met: {self.preconditions_met}")
        for key in sorted(self.inputs):
            lines.append(f"  {key}: {self.inputs[key]!r}")
        if self.note:
            lines.append(f"  note: {self.note}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ChainBoundReport:
    """Product bound and union-bound probability for a noisy QR chain."""

    per_step_factors: np.ndarray
    kappa_product_bound: float
    probability_lower_bound: float
    per_step_probabilities: np.ndarray = field(default_factory=lambda: np.empty(0))
    probability_error_bound: float = 0.0


def rank2_eigenvalues(a_norm: float, b: float) -> np.ndarray:
    """Eigenvalues {0, (b +- sqrt(b^2 + 4 a_norm^2))/2} of the bordered
    symmetric matrix [[0, a^T], [a, b]], returned as (0, minus, plus)."""
    a_norm = float(a_norm)
    b = float(b)
    if not (math.isfinite(a_norm) and math.isfinite(b)):
        raise DomainError("rank2_eigenvalues requires finite inputs")
    if a_norm < 0.0:
        raise DomainError(f"rank2_eigenvalues requires a_norm >= 0, got {a_norm}")
    s = math.hypot(b, 2.0 * a_norm)
    return np.array([0.0, 0.5 * (b - s), 0.5 * (b + s)])


def _require_perp(b: np.ndarray, x: np.ndarray, smax: float) -> None:
    xnorm = float(np.linalg.norm(x))
    btx = float(np.linalg.norm(b.T @ x))
    if btx > _PERP_TOL * smax * xnorm:
        raise PreconditionError(
            f"x is not orthogonal to span(b): ||b^T x|| = {btx:.3e} > "
            f"{_PERP_TOL:g} * ||b|| * ||x|| = {_PERP_TOL * smax * xnorm:.3e}"
        )


def _try_cond(mat: np.ndarray) -> float | None:
    try:
        return cond(mat)
    except RankDeficiencyError:
        return None


def _sharp_appended_eigen_bounds(
    smax2: float, smin2: float, bprime: float, a_norm: float
) -> tuple[float, float]:
    """Certified eigenvalue bracket for [B, b]^T [B, b].

    Splitting off the positive (negative) semidefinite part B^T B -
    sigma^2 I before the bordered-matrix eigenvalues gives

        lambda_max <= smax2 + (c+ + sqrt(c+^2 + 4 a^2)) / 2,
        lambda_min >= smin2 + (c- - sqrt(c-^2 + 4 a^2)) / 2,

    with c+- = bprime - s^2, bprime the appended diagonal entry and a the
    coupling vector norm. Unlike the headline formula these hold with no
    restriction, so they certify it instance by instance.
    """
    cmax = bprime - smax2
    lmax = smax2 + 0.5 * (cmax + math.hypot(cmax, 2.0 * a_norm))
    cmin = bprime - smin2
    lmin = smin2 + 0.5 * (cmin - math.hypot(cmin, 2.0 * a_norm))
    return lmax, lmin


def kappa_bound_general_scalar(
    smax: float, smin: float, xy_norm: float, bty_norm: float, gamma: float
) -> tuple[float, bool]:
    """Scalar form of the assumption-free kappa bound; returns (bound, ok).

    The bound follows the headline formula. ok=True only when the value is
    certified: the denominator must be positive and the formula must
    dominate the sharp eigenvalue bracket (the headline denominator can
    overshoot the true lambda_min, e.g. when gamma^2 ||x+y||^2 is small
    against sigma_min^2, and then the printed value undercuts the true
    kappa; such instances are flagged, not reported as valid bounds).
    """
    g2 = gamma * gamma
    s2 = xy_norm * xy_norm
    bprime = g2 * s2
    a_norm = abs(gamma) * bty_norm
    root = math.hypot(bprime, 2.0 * a_norm)
    num = 2.0 * smax * smax + bprime + root
    den = 2.0 * smin * smin + bprime - root
    if den <= 0.0:
        return math.inf, False
    bound = math.sqrt(num / den)
    lmax, lmin = _sharp_appended_eigen_bounds(smax * smax, smin * smin, bprime, a_norm)
    if lmin <= 0.0:
        return bound, False
    return bound, bound >= math.sqrt(lmax / lmin) * (1.0 - 1e-12)


def kappa_bound_general(b, x, y, gamma: float) -> BoundReport:
    """Bound on kappa([b, (x+y)*gamma]) with no assumptions on b or y,
    requiring only x orthogonal to span(b)."""
    b = _check_matrix(b, "b")
    x = _check_vector(x, "x")
    y = _check_vector(y, "y")
    gamma = float(gamma)
    if gamma == 0.0 or not math.isfinite(gamma):
        raise DomainError(f"kappa_bound_general requires gamma != 0, got {gamma}")
    if not (b.shape[0] == x.shape[0] == y.shape[0]):
        raise DomainError("dimension mismatch between b, x and y")
    sv = singular_values(b)
    smax, smin = float(sv[0]), float(sv[-1])
    _require_perp(b, x, smax)
    xy = x + y
    xy_norm = float(np.linalg.norm(xy))
    bty_norm = float(np.linalg.norm(b.T @ y))
    bound, ok = kappa_bound_general_scalar(smax, smin, xy_norm, bty_norm, gamma)
    actual = _try_cond(append_column(b, xy, gamma))
    if ok:
        note = ""
    elif math.isinf(bound):
        note = "nonpositive denominator"
    else:
        note = "formula not certified against the sharp eigenvalue bracket"
    return BoundReport(
        op="kappa_bound_general",
        bound_value=bound,
        actual_value=actual,
        inputs={
            "sigma_max": smax,
            "sigma_min": smin,
            "gamma": gamma,
            "xy_norm": xy_norm,
            "bty_norm": bty_norm,
        },
        preconditions_met=ok,
        note=note,
    )


def kappa_bound_eps_scalar(
    smax: float, smin: float, xy_norm: float, bty_norm: float, eps: float
) -> tuple[float, bool]:
    """Scalar form of the normalized-column epsilon bound; returns (bound, ok).

    Same certification as the matrix form: the hypothesis
    sqrt(1 + 4 (bty/xy)^2) <= eps must hold, the denominator
    2 sigma_min^2 + 1 - eps must be positive, and the value must dominate
    the sharp eigenvalue bracket.
    """
    if xy_norm <= 0.0:
        raise DomainError("kappa_bound_eps_scalar requires xy_norm > 0")
    kappa_b = smax / smin
    hyp = math.sqrt(1.0 + 4.0 * (bty_norm / xy_norm) ** 2)
    den = 2.0 * smin * smin + 1.0 - eps
    if hyp > eps or den <= 0.0:
        return math.inf, False
    inv_k2 = 1.0 / (kappa_b * kappa_b)
    f = (eps * (1.0 + inv_k2) - (1.0 - inv_k2)) / den
    bound = kappa_b * math.sqrt(1.0 + f)
    lmax, lmin = _sharp_appended_eigen_bounds(
        smax * smax, smin * smin, 1.0, bty_norm / xy_norm
    )
    if lmin <= 0.0:
        return bound, False
    return bound, bound >= math.sqrt(lmax / lmin) * (1.0 - 1e-12)


def kappa_bound_eps(b, x, y, eps: float) -> BoundReport:
    """Bound kappa([b, (x+y)/||x+y||]) <= kappa(b) sqrt(1 + f) for the
    normalized noisy column, under sqrt(1 + 4 ||b^T y||^2 / ||x+y||^2) <= eps.

    f = (eps (1 + 1/kappa^2) - (1 - 1/kappa^2)) / (2 sigma_min^2 + 1 - eps),
    which also needs 2 sigma_min^2 + 1 - eps > 0.
    """
    b = _check_matrix(b, "b")
    x = _check_vector(x, "x")
    y = _check_vector(y, "y")
    eps = float(eps)
    if not math.isfinite(eps) or eps <= 0.0:
        raise DomainError(f"kappa_bound_eps requires eps > 0, got {eps}")
    if not (b.shape[0] == x.shape[0] == y.shape[0]):
        raise DomainError("dimension mismatch between b, x and y")
    sv = singular_values(b)
    smax, smin = float(sv[0]), float(sv[-1])
    if smin <= 0.0:
        raise RankDeficiencyError("kappa_bound_eps requires full column rank")
    _require_perp(b, x, smax)
    xy = x + y
    xy_norm = float(np.linalg.norm(xy))
    if xy_norm == 0.0:
        raise DomainError("kappa_bound_eps requires x + y != 0")
    bty_norm = float(np.linalg.norm(b.T @ y))
    kappa_b = smax / smin
    hyp = math.sqrt(1.0 + 4.0 * (bty_norm / xy_norm) ** 2)
    den = 2.0 * smin * smin + 1.0 - eps
    bound, ok = kappa_bound_eps_scalar(smax, smin, xy_norm, bty_norm, eps)
    if ok:
        note = ""
    elif hyp > eps:
        note = "hypothesis violated"
    elif den <= 0.0:
        note = "nonpositive denominator"
    else:
        note = "formula not certified against the sharp eigenvalue bracket"
    actual = _try_cond(append_column(b, xy / xy_norm, 1.0))
    return BoundReport(
        op="kappa_bound_eps",
        bound_value=bound,
        actual_value=actual,
        inputs={
            "sigma_max": smax,
            "sigma_min": smin,
            "kappa_b": kappa_b,
            "xy_norm": xy_norm,
            "bty_norm": bty_norm,
            "eps": eps,
        },
        preconditions_met=ok,
        note=note,
    )


def liesen_kappa_from_residual(c_norm: float, gamma: float, r_norm: float) -> float:
    """kappa([q, c*gamma]) = (alpha + sqrt(alpha^2 - 4 gamma^2 r^2)) / (2 gamma r)
    for orthonormal q, alpha = 1 + gamma^2 c_norm^2. An equality, not a bound."""
    c_norm, gamma, r_norm = float(c_norm), float(gamma), float(r_norm)
    if not (math.isfinite(c_norm) and math.isfinite(gamma) and math.isfinite(r_norm)):
        raise DomainError("liesen_kappa_from_residual requires finite inputs")
    if c_norm < 0.0 or gamma <= 0.0 or r_norm <= 0.0:
        raise DomainError(
            f"liesen_kappa_from_residual requires c_norm >= 0, gamma > 0, r_norm > 0; "
            f"got {c_norm}, {gamma}, {r_norm}"
        )
    alpha = 1.0 + gamma * gamma * c_norm * c_norm
    # product form avoids cancellation near the kappa = 1 fold
    disc = (alpha - 2.0 * gamma * r_norm) * (alpha + 2.0 * gamma * r_norm)
    if disc < 0.0:
        if disc < -1e-12 * alpha * alpha:
            raise DomainError(
                f"negative discriminant {disc:.3e}: no real instance has "
                f"c_norm={c_norm}, gamma={gamma}, r_norm={r_norm}"
            )
        disc = 0.0
    return (alpha + math.sqrt(disc)) / (2.0 * gamma * r_norm)


def liesen_residual_from_kappa(c_norm: float, gamma: float, kappa: float) -> float:
    """Inverse map: ||r|| = (alpha/gamma) * kappa / (kappa^2 + 1)."""
    c_norm, gamma, kappa = float(c_norm), float(gamma), float(kappa)
    if not (math.isfinite(c_norm) and math.isfinite(gamma) and math.isfinite(kappa)):
        raise DomainError("liesen_residual_from_kappa requires finite inputs")
    if c_norm < 0.0 or gamma <= 0.0 or kappa < 1.0:
        raise DomainError(
            f"liesen_residual_from_kappa requires c_norm >= 0, gamma > 0, kappa >= 1; "
            f"got {c_norm}, {gamma}, {kappa}"
        )
    alpha = 1.0 + gamma * gamma * c_norm * c_norm
    return (alpha / gamma) * kappa / (kappa * kappa + 1.0)


def liesen_residual_identity_check(b, c, gamma: float) -> float:
    """Compute ||r|| three ways and return the max pairwise relative gap.

    Route 1 solves the least squares problem directly. Route 2 uses the
    singular-value product (sigma_min([b, c g])/g) prod_j sigma_j([b, c g])
    / sigma_j(b). Route 3 uses (1/g) sigma_min([q, c g]) sigma_max([q, c g])
    with q from householder_qr(b).
    """
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"identity check requires gamma > 0, got {gamma}")
    if b.shape[0] != c.shape[0]:
        raise DomainError("dimension mismatch between b and c")
    n = b.shape[1]
    _, r = ls_residual(b, c)
    r1 = float(np.linalg.norm(r))
    if r1 <= 1e-13 * max(1.0, float(np.linalg.norm(c))):
        raise PreconditionError("identity check requires a nonzero residual (c not in span(b))")
    appended = append_column(b, c, gamma)
    sv_app = singular_values(appended)
    if sv_app[-1] <= 1e-10 * sv_app[0]:
        raise RankDeficiencyError("[b, c*gamma] is numerically rank deficient")
    sv_b = singular_values(b)
    r2 = float(sv_app[-1] / gamma * np.prod(sv_app[:n] / sv_b))
    q = householder_qr(b).q
    sv_q = singular_values(append_column(q, c, gamma))
    r3 = float(sv_q[0] * sv_q[-1] / gamma)
    vals = (r1, r2, r3)
    scale = max(vals)
    return max(abs(u - v) for u in vals for v in vals) / scale


def minmax_singular_bounds(b, c, gamma: float) -> tuple[BoundReport, BoundReport]:
    """sigma_max([b, c g]) <= max(sigma_max(b), g) sigma_max([q, c]) and
    sigma_min([b, c g]) >= min(sigma_min(b), g) sigma_min([q, c])."""
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"minmax_singular_bounds requires gamma > 0, got {gamma}")
    q = householder_qr(b).q
    sv_b = singular_values(b)
    sv_qc = singular_values(append_column(q, c, 1.0))
    sv_app = singular_values(append_column(b, c, gamma))
    inputs = {
        "sigma_max": float(sv_b[0]),
        "sigma_min": float(sv_b[-1]),
        "gamma": gamma,
        "c_norm": float(np.linalg.norm(c)),
    }
    upper = BoundReport(
        op="sigma_max_bound",
        bound_value=max(float(sv_b[0]), gamma) * float(sv_qc[0]),
        actual_value=float(sv_app[0]),
        inputs=inputs,
        preconditions_met=True,
    )
    lower = BoundReport(
        op="sigma_min_bound",
        bound_value=min(float(sv_b[-1]), gamma) * float(sv_qc[-1]),
        actual_value=float(sv_app[-1]),
        inputs=inputs,
        preconditions_met=True,
        direction="lower",
    )
    return upper, lower


def kappa_bound_via_q(b, c, gamma: float) -> BoundReport:
    """kappa([b, c g]) <= max(kappa(b), ||b||/g, g/sigma_min(b)) * kappa([q, c])."""
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"kappa_bound_via_q requires gamma > 0, got {gamma}")
    q = householder_qr(b).q
    sv_b = singular_values(b)
    smax, smin = float(sv_b[0]), float(sv_b[-1])
    kappa_qc = cond(append_column(q, c, 1.0))
    factor = max(smax / smin, smax / gamma, gamma / smin)
    actual = _try_cond(append_column(b, c, gamma))
    return BoundReport(
        op="kappa_bound_via_q",
        bound_value=factor * kappa_qc,
        actual_value=actual,
        inputs={
            "sigma_max": smax,
            "sigma_min": smin,
            "gamma": gamma,
            "kappa_qc": kappa_qc,
            "c_norm": float(np.linalg.norm(c)),
        },
        preconditions_met=True,
    )


def _require_unit_columns(b: np.ndarray) -> None:
    norms = np.linalg.norm(b, axis=0)
    dev = float(np.max(np.abs(norms - 1.0)))
    if dev > _UNIT_TOL:
        raise PreconditionError(
            f"columns must have unit norm (max deviation {dev:.3e} > {_UNIT_TOL:g})"
        )


def kappa_bound_unit_columns(b, c, gamma: float) -> BoundReport:
    """kappa([b, c g]) <= kappa(b) (alpha + sqrt(alpha^2 - 4 r^2)) / (2 r)
    for unit-column b, alpha = 1 + g^2 ||c||^2, r the residual of the
    scaled column: ||r|| = min_z ||c g - b z||.

    The factor is the exact orthonormal-case kappa of appending the scaled
    column, so it carries no loose gamma factors; at gamma = 1 it matches
    the familiar (alpha + sqrt(alpha^2 - 4 g^2 r^2)) / (2 g r) form.
    """
    b = _check_matrix(b, "b")
    c = _check_vector(c, "c")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"kappa_bound_unit_columns requires gamma > 0, got {gamma}")
    _require_unit_columns(b)
    c_norm = float(np.linalg.norm(c))
    kappa_b = cond(b)
    _, r = ls_residual(b, gamma * c)
    r_norm = float(np.linalg.norm(r))
    inputs = {
        "gamma": gamma,
        "c_norm": c_norm,
        "r_norm": r_norm,
        "kappa_b": kappa_b,
    }
    actual = _try_cond(append_column(b, c, gamma))
    if r_norm <= 1e-13 * max(1.0, gamma * c_norm):
        return BoundReport(
            op="kappa_bound_unit_columns",
            bound_value=math.inf,
            actual_value=actual,
            inputs=inputs,
            preconditions_met=False,
            note="zero residual: c lies in span(b), the factor has a pole",
        )
    factor = liesen_kappa_from_residual(gamma * c_norm, 1.0, r_norm)
    return BoundReport(
        op="kappa_bound_unit_columns",
        bound_value=kappa_b * factor,
        actual_value=actual,
        inputs=inputs,
        preconditions_met=True,
    )


def kappa_bound_unit_q(b, q) -> BoundReport:
    """kappa([b, q]) <= kappa(b) (1 + sqrt(1 - ||r||^2)) / ||r|| for
    unit-column b and unit q, r the least squares residual of q."""
    b = _check_matrix(b, "b")
    q = _check_vector(q, "q")
    _require_unit_columns(b)
    qn = float(np.linalg.norm(q))
    if abs(qn - 1.0) > _UNIT_TOL:
        raise PreconditionError(f"q must have unit norm, got ||q|| = {qn!r}")
    kappa_b = cond(b)
    _, r = ls_residual(b, q)
    r_norm = float(np.linalg.norm(r))
    inputs = {"r_norm": r_norm, "kappa_b": kappa_b}
    actual = _try_cond(append_column(b, q, 1.0))
    if r_norm <= 1e-13:
        return BoundReport(
            op="kappa_bound_unit_q",
            bound_value=math.inf,
            actual_value=actual,
            inputs=inputs,
            preconditions_met=False,
            note="zero residual: q lies in span(b), the factor has a pole",
        )
    factor = (1.0 + math.sqrt(max(1.0 - r_norm * r_norm, 0.0))) / r_norm
    return BoundReport(
        op="kappa_bound_unit_q",
        bound_value=kappa_b * factor,
        actual_value=actual,
        inputs=inputs,
        preconditions_met=True,
    )


def residual_tail_prob(
    m: int, n: int, x_norm: float, sigma: float, eps1: float, eps2: float
) -> TailProbability:
    """P(||r|| >= 1/sqrt(1 + (e1/e2)^2)) for the noisy least squares residual.

    Equals the noncentral-F survival SF_{F'(m-n, n; x_norm^2/sigma^2)}
    evaluated at n e2^2 / ((m-n) e1^2). The epsilon ratio enters squared:
    the event compares norms, the F statistic compares squared norms, and
    sigma cancels inside the ratio.
    """
    m, n = int(m), int(n)
    if not (m > n >= 1):
        raise DomainError(f"residual_tail_prob requires m > n >= 1, got m={m}, n={n}")
    x_norm, sigma, eps1, eps2 = map(float, (x_norm, sigma, eps1, eps2))
    if x_norm < 0.0 or sigma <= 0.0 or eps1 <= 0.0 or eps2 <= 0.0:
        raise DomainError(
            "residual_tail_prob requires x_norm >= 0, sigma > 0, eps1 > 0, eps2 > 0"
        )
    lam = (x_norm / sigma) ** 2
    arg = (n * eps2 * eps2) / ((m - n) * eps1 * eps1)
    return noncentral_f_sf(m - n, n, lam, arg)


def growth_factor(eps1: float, eps2: float) -> float:
    """g(e1, e2) = e1/e2 + sqrt(1 + (e1/e2)^2), the kappa growth factor at
    the residual threshold 1/sqrt(1 + (e1/e2)^2). Always >= 1."""
    eps1, eps2 = float(eps1), float(eps2)
    if eps1 < 0.0 or eps2 <= 0.0:
        raise DomainError(f"growth_factor requires eps1 >= 0, eps2 > 0, got {eps1}, {eps2}")
    rho = eps1 / eps2
    return rho + math.hypot(1.0, rho)


def printed_growth_factor(eps1: float, eps2: float) -> float:
    """The commonly printed variant e1 sqrt(1 + (e1/e2)^2), kept for the
    errata-report; it can fall below 1, which no kappa ratio satisfies."""
    eps1, eps2 = float(eps1), float(eps2)
    rho = eps1 / eps2
    return eps1 * math.hypot(1.0, rho)


def kappa_growth_prob(
    b, x_norm: float, sigma: float, eps1: float, eps2: float
) -> tuple[float, TailProbability]:
    """kappa([b, q]) <= g(e1, e2) * kappa(b) with probability at least
    residual_tail_prob(m, n, x_norm, sigma, e1, e2), for the normalized
    noisily orthogonalized column q."""
    b = _check_matrix(b, "b")
    m, n = b.shape
    prob = residual_tail_prob(m, n, x_norm, sigma, eps1, eps2)
    return cond(b) * growth_factor(eps1, eps2), prob


def qr_chain_bound(
    m: int,
    n: int,
    a_norms,
    sigma: float,
    eps1_list,
    eps2_list,
) -> ChainBoundReport:
    """Union bound for a full noisy orthogonalization chain.

    Step i (2 <= i <= n) succeeds with probability p_i given by
    residual_tail_prob with dimensions (m - i, i) and noncentrality
    ||a_i||^2 / sigma^2; on the joint success event the final kappa is at
    most the product of the per-step growth factors. The probability lower
    bound is max(0, 1 - sum(1 - p_i)).
    """
    m, n = int(m), int(n)
    if not (1 <= n <= m):
        raise DomainError(f"qr_chain_bound requires 1 <= n <= m, got m={m}, n={n}")
    if n == 1:
        return ChainBoundReport(np.empty(0), 1.0, 1.0, np.empty(0), 0.0)
    if m <= n:
        raise DomainError(f"qr_chain_bound requires m > n for n >= 2, got m={m}, n={n}")
    a_norms = np.asarray(a_norms, dtype=np.float64)
    eps1_list = np.asarray(eps1_list, dtype=np.float64)
    eps2_list = np.asarray(eps2_list, dtype=np.float64)
    if not (a_norms.shape == eps1_list.shape == eps2_list.shape == (n - 1,)):
        raise DomainError(
            f"qr_chain_bound needs arrays of length n-1 = {n - 1}, got "
            f"{a_norms.shape}, {eps1_list.shape}, {eps2_list.shape}"
        )
    factors = np.empty(n - 1)
    probs = np.empty(n - 1)
    err = 0.0
    deficit = 0.0
    for idx, i in enumerate(range(2, n + 1)):
        factors[idx] = growth_factor(eps1_list[idx], eps2_list[idx])
        p = residual_tail_prob(m, i, a_norms[idx], sigma, eps1_list[idx], eps2_list[idx])
        probs[idx] = p.value
        err += p.abs_error_bound
        deficit += 1.0 - p.value
    return ChainBoundReport(
        per_step_factors=factors,
        kappa_product_bound=float(np.prod(factors)),
        probability_lower_bound=max(0.0, 1.0 - deficit),
        per_step_probabilities=probs,
        probability_error_bound=err,
    )
