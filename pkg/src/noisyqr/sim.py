"""Seeded Monte Carlo harness for the probabilistic laws.

Reproducibility contract: every experiment is a pure function of its
:class:`ExperimentConfig`. Trials are partitioned into fixed-size blocks;
block k draws from ``SeedSequence(seed).spawn(...)[k]`` through a Philox
(counter-based) generator, and block results are reduced in block order.
Worker threads only change which thread runs a block, never the result,
so output is byte-identical for any worker count. All randomness flows
from the config seed; no OS entropy is consulted anywhere.

Degenerate trials (a dependent input column during the noisy chain) are
excluded and counted, never resampled, so reported frequencies stay
unbiased.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .bounds import ChainBoundReport, growth_factor, qr_chain_bound, residual_tail_prob
from .errors import DomainError, RankDeficiencyError
from .linalg import householder_qr, orthonormal_complement
from .specfun import TailProbability, norm_tail_prob

BLOCK_TRIALS = 16384

FIG1_NAME = "fig1_norm_tail.csv"
FIG2_NAME = "fig2_norm_tail.csv"


@dataclass(frozen=True)
class ExperimentConfig:
    """Dimensions, noise level, thresholds, trial count, and seed."""

    m: int
    trials: int
    seed: int
    sigma: float = 1.0
    n: int = 0
    x_norm: float = 0.0
    eps: float | None = None
    eps1: float | None = None
    eps2: float | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.n < 0:
            raise DomainError(f"n must be >= 0, got {self.n}")
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not (0 <= self.seed < 2**64):
            raise DomainError("seed must fit in 64 unsigned bits")
        # sigma = 0 is meaningful only for the noiseless chain run
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be nonnegative, got {self.sigma}")
        if self.x_norm < 0.0:
            raise DomainError(f"x_norm must be >= 0, got {self.x_norm}")


@dataclass(frozen=True)
class TrialSummary:
    """Empirical frequency against a theoretical probability.

    stderr is the binomial standard error under the theoretical p,
    floored at 1/trials; z_score = (empirical - theory) / stderr.
    """

    empirical_prob: float
    theory_prob: float
    stderr: float
    trials: int
    z_score: float

    @classmethod
    def from_counts(cls, count: int, trials: int, theory: TailProbability) -> "TrialSummary":
        emp = count / trials
        p = theory.value
        se = max(math.sqrt(p * (1.0 - p) / trials), 1.0 / trials)
        return cls(emp, p, se, trials, (emp - p) / se)


@dataclass(frozen=True)
class ProjectionReport:
    """Covariance and tail-law checks for noise pushed through a projector."""

    m: int
    n: int
    sigma: float
    trials: int
    cov_max_dev: float
    cov_tol: float
    tail: TrialSummary


@dataclass(frozen=True)
class NoisyQrReport:
    """Outcome of the noisy orthogonalization chain experiment."""

    m: int
    n: int
    sigma: float
    trials: int
    completed: int
    excluded: int
    violations: int
    violation_frequency: float
    allowance: float
    stderr: float
    chain: ChainBoundReport
    kappa_final_max: float
    kappa_min: float
    monotonicity_failures: int
    mean_a_norms: np.ndarray


def philox_stream(seed) -> np.random.Generator:
    """Counter-based generator for a seed or SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    return np.random.Generator(np.random.Philox(seed))


def gaussian_vector(m: int, sigma: float, stream: np.random.Generator) -> np.ndarray:
    """m i.i.d. draws from N(0, sigma^2)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    if not sigma > 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return sigma * stream.standard_normal(m)


def _block_sizes(trials: int) -> list[int]:
    full, rem = divmod(trials, BLOCK_TRIALS)
    return [BLOCK_TRIALS] * full + ([rem] if rem else [])


def _run_blocks(seeds, sizes, fn, workers: int) -> list:
    """Apply fn(seed_seq, size) to every block; results in block order."""
    if workers <= 1:
        return [fn(ss, size) for ss, size in zip(seeds, sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, ss, size) for ss, size in zip(seeds, sizes)]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# norm tail: P(||X + Y|| > eps)
# ---------------------------------------------------------------------------


def norm_tail_experiment(cfg: ExperimentConfig, workers: int = 1) -> TrialSummary:
    """Empirical P(||X + Y|| > eps) for fixed ||X|| = x_norm against the
    Marcum-Q tail law. X is taken along the first coordinate axis; the law
    depends on X only through its norm."""
    if cfg.eps is None:
        raise DomainError("norm_tail_experiment requires cfg.eps")
    if cfg.sigma <= 0.0:
        raise DomainError("norm_tail_experiment requires sigma > 0")
    sizes = _block_sizes(cfg.trials)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def block(ss, size):
        y = cfg.sigma * philox_stream(ss).standard_normal((size, cfg.m))
        return _kernels.norm_tail_count(y, cfg.x_norm, cfg.eps)

    counts = _run_blocks(seeds, sizes, block, workers)
    theory = norm_tail_prob(cfg.x_norm, cfg.sigma, cfg.eps, cfg.m)
    return TrialSummary.from_counts(int(sum(counts)), cfg.trials, theory)


def norm_tail_sweep(
    cfg: ExperimentConfig, sigmas, workers: int = 1
) -> list[tuple[float, TrialSummary]]:
    """One norm-tail experiment per sigma; grid points use independent
    child streams of the config seed."""
    sigmas = [float(s) for s in sigmas]
    point_seeds = np.random.SeedSequence(cfg.seed).spawn(len(sigmas))
    out = []
    for sigma, pseed in zip(sigmas, point_seeds):
        sizes = _block_sizes(cfg.trials)
        seeds = pseed.spawn(len(sizes))

        def block(ss, size, sigma=sigma):
            y = sigma * philox_stream(ss).standard_normal((size, cfg.m))
            return _kernels.norm_tail_count(y, cfg.x_norm, cfg.eps)

        counts = _run_blocks(seeds, sizes, block, workers)
        theory = norm_tail_prob(cfg.x_norm, sigma, cfg.eps, cfg.m)
        out.append((sigma, TrialSummary.from_counts(int(sum(counts)), cfg.trials, theory)))
    return out


def log_sigma_grid(start: float, stop: float, count: int) -> np.ndarray:
    """Log-spaced sigma grid, inclusive of both endpoints."""
    if not (start > 0.0 and stop > 0.0 and count >= 1):
        raise DomainError("sigma grid needs positive endpoints and count >= 1")
    if count == 1:
        return np.array([start])
    return np.geomspace(start, stop, count)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_norm_tail_csv(path, cfg: ExperimentConfig, rows) -> None:
    """rows: iterable of (m, sigma, TrialSummary)."""
    lines = ["m,x_norm,eps,sigma,trials,seed,empirical,theory,theory_err,stderr,z"]
    for m, sigma, s in rows:
        theory = norm_tail_prob(cfg.x_norm, sigma, cfg.eps, m)
        lines.append(
            ",".join(
                [
                    _fmt(m),
                    _fmt(cfg.x_norm),
                    _fmt(cfg.eps),
                    _fmt(sigma),
                    _fmt(s.trials),
                    _fmt(cfg.seed),
                    _fmt(s.empirical_prob),
                    _fmt(s.theory_prob),
                    _fmt(theory.abs_error_bound),
                    _fmt(s.stderr),
                    _fmt(s.z_score),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def reproduce_figure_data(
    outdir,
    trials: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    ms: tuple[int, ...] = (10, 100),
    grid_points: int = 20,
) -> list[Path]:
    """Write the two norm-tail agreement data files.

    fig1 sweeps sigma in [1e-3, 1] at eps = 0.9, fig2 at eps = 1.5, both
    for ||X|| = 1 and each m in ``ms``. Each (eps, m) pair gets a distinct
    derived seed so the grids are independent.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    sigmas = log_sigma_grid(1e-3, 1.0, grid_points)
    written = []
    for fig_idx, (eps, name) in enumerate(((0.9, FIG1_NAME), (1.5, FIG2_NAME))):
        rows = []
        cfg0 = None
        for m_idx, m in enumerate(ms):
            cfg = ExperimentConfig(
                m=m,
                trials=trials,
                seed=seed + 1000 * fig_idx + m_idx,
                x_norm=1.0,
                eps=eps,
            )
            cfg0 = cfg if cfg0 is None else cfg0
            for sigma, summary in norm_tail_sweep(cfg, sigmas, workers):
                rows.append((m, sigma, summary))
        path = outdir / name
        write_norm_tail_csv(path, cfg0, rows)
        written.append(path)
    return written


# ---------------------------------------------------------------------------
# projection of noise onto a complement
# ---------------------------------------------------------------------------


def projection_noise_experiment(cfg: ExperimentConfig, workers: int = 1) -> ProjectionReport:
    """Push Gaussian noise through an orthonormal complement.

    One Haar-random orthonormal q (QR of a Gaussian matrix) serves every
    trial; ybar = qperp^T y must have uncentered sample covariance within
    5 sigma^2 / sqrt(trials) of sigma^2 I, and ||X + P_perp(y)|| must obey
    the Marcum tail law with order (m - n)/2.
    """
    if cfg.eps is None:
        raise DomainError("projection_noise_experiment requires cfg.eps")
    if cfg.sigma <= 0.0:
        raise DomainError("projection_noise_experiment requires sigma > 0")
    if cfg.n >= cfg.m:
        raise DomainError(f"projection needs n < m, got n={cfg.n}, m={cfg.m}")
    root = np.random.SeedSequence(cfg.seed)
    sizes = _block_sizes(cfg.trials)
    children = root.spawn(1 + len(sizes))
    if cfg.n == 0:
        qperp = np.eye(cfg.m)
    else:
        gq = philox_stream(children[0])
        q = householder_qr(gq.standard_normal((cfg.m, cfg.n))).q
        qperp = orthonormal_complement(q)
    k = cfg.m - cfg.n
    eps2 = cfg.eps * cfg.eps

    def block(ss, size):
        y = cfg.sigma * philox_stream(ss).standard_normal((size, cfg.m))
        ybar = y @ qperp
        s2 = ybar.T @ ybar
        ybar[:, 0] += cfg.x_norm
        count = int(np.count_nonzero(np.einsum("ij,ij->i", ybar, ybar) > eps2))
        return count, s2

    results = _run_blocks(children[1:], sizes, block, workers)
    count = sum(r[0] for r in results)
    s2 = sum(r[1] for r in results)
    cov = s2 / cfg.trials
    dev = float(np.max(np.abs(cov - cfg.sigma**2 * np.eye(k))))
    tol = 5.0 * cfg.sigma**2 / math.sqrt(cfg.trials)
    theory = norm_tail_prob(cfg.x_norm, cfg.sigma, cfg.eps, k)
    return ProjectionReport(
        m=cfg.m,
        n=cfg.n,
        sigma=cfg.sigma,
        trials=cfg.trials,
        cov_max_dev=dev,
        cov_tol=tol,
        tail=TrialSummary.from_counts(count, cfg.trials, theory),
    )


# ---------------------------------------------------------------------------
# least squares residual under noise
# ---------------------------------------------------------------------------


def ls_residual_experiment(cfg: ExperimentConfig, workers: int = 1) -> TrialSummary:
    """Empirical P(||r|| >= 1/sqrt(1 + (e1/e2)^2)) for the noisy residual.

    Per trial: a fresh Gaussian (m, n) matrix fixes the subspace, X sits
    along the first complement direction with ||X|| = x_norm, and the
    event compares ||P_Q y|| against (e1/e2) ||X + P_perp y||. This
    experiment arbitrates the squared-ratio form of the F argument.
    """
    if cfg.eps1 is None or cfg.eps2 is None:
        raise DomainError("ls_residual_experiment requires cfg.eps1 and cfg.eps2")
    if cfg.sigma <= 0.0:
        raise DomainError("ls_residual_experiment requires sigma > 0")
    if not (cfg.m > cfg.n >= 1):
        raise DomainError(f"ls_residual_experiment needs m > n >= 1, got {cfg.m}, {cfg.n}")
    ratio = cfg.eps1 / cfg.eps2
    sizes = _block_sizes(cfg.trials)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def block(ss, size):
        gen = philox_stream(ss)
        a = gen.standard_normal((size, cfg.m, cfg.n))
        y = cfg.sigma * gen.standard_normal((size, cfg.m))
        return _kernels.ls_residual_count(a, y, cfg.x_norm, ratio)

    counts = _run_blocks(seeds, sizes, block, workers)
    theory = residual_tail_prob(cfg.m, cfg.n, cfg.x_norm, cfg.sigma, cfg.eps1, cfg.eps2)
    return TrialSummary.from_counts(int(sum(counts)), cfg.trials, theory)


# ---------------------------------------------------------------------------
# noisy orthogonalization chain
# ---------------------------------------------------------------------------


def make_unit_column_matrix(m: int, n: int, seed: int) -> np.ndarray:
    """Gaussian m x n matrix with columns normalized to unit length."""
    gen = philox_stream(seed)
    a = gen.standard_normal((m, n))
    return a / np.linalg.norm(a, axis=0)


def noisy_qr_experiment(
    cfg: ExperimentConfig, input_matrix, workers: int = 1
) -> NoisyQrReport:
    """Run the noisy Gram-Schmidt chain and test the product bound.

    Step i projects input column i exactly against the computed columns,
    adds N(0, sigma^2 I_m) noise once, and normalizes. The chain bound's
    noncentralities use the projection norms of the noiseless pass. A
    trial is a violation when the final kappa exceeds the product bound;
    degenerate trials (dependent column) are excluded and counted.
    """
    if cfg.eps1 is None or cfg.eps2 is None:
        raise DomainError("noisy_qr_experiment requires cfg.eps1 and cfg.eps2")
    a = np.ascontiguousarray(np.asarray(input_matrix, dtype=np.float64))
    m, n = a.shape
    if (m, n) != (cfg.m, cfg.n):
        raise DomainError(f"input matrix is {a.shape}, config says ({cfg.m}, {cfg.n})")
    if not (m >= n >= 2):
        raise DomainError(f"noisy_qr_experiment needs m >= n >= 2, got {m}, {n}")
    v_rows = np.ascontiguousarray(a.T)

    # noiseless pass fixes the nominal projection norms for the bound
    zero_noise = np.zeros((1, n, m))
    _, _, _, excl0, a_norms0, comp0 = _kernels.chain_batch(v_rows, zero_noise, 0.0)
    if comp0 != 1 or excl0[0] != 0:
        raise RankDeficiencyError(
            f"input column {int(excl0[0])} is dependent on its predecessors"
        )
    if cfg.sigma > 0.0:
        chain = qr_chain_bound(
            m,
            n,
            a_norms0[1:],
            cfg.sigma,
            np.full(n - 1, cfg.eps1),
            np.full(n - 1, cfg.eps2),
        )
    else:
        # noiseless model: every residual has full norm, every step succeeds
        factors = np.array([growth_factor(cfg.eps1, cfg.eps2)] * (n - 1))
        chain = ChainBoundReport(
            per_step_factors=factors,
            kappa_product_bound=float(np.prod(factors)),
            probability_lower_bound=1.0,
            per_step_probabilities=np.ones(n - 1),
            probability_error_bound=0.0,
        )

    sizes = _block_sizes(cfg.trials)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def block(ss, size):
        e = philox_stream(ss).standard_normal((size, n, m))
        return _kernels.chain_batch(v_rows, e, cfg.sigma)

    results = _run_blocks(seeds, sizes, block, workers)

    bound = chain.kappa_product_bound
    violations = 0
    excluded = 0
    completed = 0
    kappa_final_max = 0.0
    kappa_min = math.inf
    mono_failures = 0
    a_norm_sums = np.zeros(n)
    for fin, kmin, mono, excl, sums, comp in results:
        mask = excl == 0
        completed += int(comp)
        excluded += int(np.count_nonzero(~mask))
        if comp:
            violations += int(np.count_nonzero(fin[mask] > bound))
            kappa_final_max = max(kappa_final_max, float(np.max(fin[mask])))
            kappa_min = min(kappa_min, float(np.min(kmin[mask])))
            mono_failures += int(np.sum(mono[mask]))
            a_norm_sums += sums
    freq = violations / completed if completed else 0.0
    allowance = min(1.0, max(0.0, 1.0 - chain.probability_lower_bound))
    denom = max(completed, 1)
    se = max(math.sqrt(allowance * (1.0 - allowance) / denom), 1.0 / denom)
    return NoisyQrReport(
        m=m,
        n=n,
        sigma=cfg.sigma,
        trials=cfg.trials,
        completed=completed,
        excluded=excluded,
        violations=violations,
        violation_frequency=freq,
        allowance=allowance,
        stderr=se,
        chain=chain,
        kappa_final_max=kappa_final_max,
        kappa_min=kappa_min,
        monotonicity_failures=mono_failures,
        mean_a_norms=a_norm_sums / max(completed, 1),
    )


# ---------------------------------------------------------------------------
# CSV writers for the single-run experiments
# ---------------------------------------------------------------------------


def write_projection_csv(path, cfg: ExperimentConfig, rep: ProjectionReport) -> None:
    lines = [
        "m,n,sigma,x_norm,eps,trials,seed,cov_max_dev,cov_tol,empirical,theory,stderr,z",
        ",".join(
            [
                _fmt(rep.m),
                _fmt(rep.n),
                _fmt(rep.sigma),
                _fmt(cfg.x_norm),
                _fmt(cfg.eps),
                _fmt(rep.trials),
                _fmt(cfg.seed),
                _fmt(rep.cov_max_dev),
                _fmt(rep.cov_tol),
                _fmt(rep.tail.empirical_prob),
                _fmt(rep.tail.theory_prob),
                _fmt(rep.tail.stderr),
                _fmt(rep.tail.z_score),
            ]
        ),
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_ls_csv(path, cfg: ExperimentConfig, s: TrialSummary) -> None:
    lines = [
        "m,n,x_norm,sigma,eps1,eps2,trials,seed,empirical,theory,stderr,z",
        ",".join(
            [
                _fmt(cfg.m),
                _fmt(cfg.n),
                _fmt(cfg.x_norm),
                _fmt(cfg.sigma),
                _fmt(cfg.eps1),
                _fmt(cfg.eps2),
                _fmt(s.trials),
                _fmt(cfg.seed),
                _fmt(s.empirical_prob),
                _fmt(s.theory_prob),
                _fmt(s.stderr),
                _fmt(s.z_score),
            ]
        ),
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_qr_noise_csv(path, cfg: ExperimentConfig, rep: NoisyQrReport) -> None:
    lines = [
        "m,n,sigma,eps1,eps2,trials,seed,completed,excluded,violations,"
        "violation_freq,allowance,stderr,product_bound,prob_lower_bound,"
        "kappa_final_max,kappa_min",
        ",".join(
            [
                _fmt(rep.m),
                _fmt(rep.n),
                _fmt(rep.sigma),
                _fmt(cfg.eps1),
                _fmt(cfg.eps2),
                _fmt(rep.trials),
                _fmt(cfg.seed),
                _fmt(rep.completed),
                _fmt(rep.excluded),
                _fmt(rep.violations),
                _fmt(rep.violation_frequency),
                _fmt(rep.allowance),
                _fmt(rep.stderr),
                _fmt(rep.chain.kappa_product_bound),
                _fmt(rep.chain.probability_lower_bound),
                _fmt(rep.kappa_final_max),
                _fmt(rep.kappa_min),
            ]
        ),
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
