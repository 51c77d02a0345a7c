"""Maximum-likelihood calibration of the cascade sub-models.

The conditional Gaussian likelihood conditions on each model's first usable
observation, so a series of n observations contributes n-1 residual terms:

    NLL = 0.5 * sum_t [ ln(2*pi*sigma^2) + eps_t^2 / sigma^2 ]

(the full constant is included, so reported log-likelihoods are comparable
across variants). Optimization runs in an unconstrained space: sigmas and
the positive long-rate mean via log, autoregressive coefficients via atanh
onto (-1, 1), everything else untransformed. Standard errors come from a
central finite-difference Hessian of the NLL in the *natural* space,
inverted by symmetric (Cholesky) elimination with a pivot check; a
non-positive-definite Hessian leaves the fit in place but reports the SEs
as absent with a warning.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import diagnostics
from .errors import DataError, FilterError, FitError
from .models import (AR_COEFFICIENTS, POSITIVE_PARAMS, CascadeState,
                     FilterInputs, FilterOutput, ModelSpec, ParamSet,
                     _ma_level, params_violation, run_filter)
from .series import AnnualSeries, align

log = logging.getLogger("saesg.estimation")

_LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# Nelder-Mead
# ---------------------------------------------------------------------------

@dataclass
class OptimizerConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    f_tol: float = 1e-10
    x_tol: float = 1e-8
    max_iter: int = 50_000
    #: absolute per-coordinate simplex offset; None means 0.1*|x0| (0.01 at 0)
    initial_step: float | None = None
    #: times to re-seed a fresh simplex at the incumbent after convergence
    restarts: int = 2


@dataclass
class NMResult:
    x: np.ndarray
    f: float
    iterations: int
    converged: bool


def _initial_simplex(x0: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        if cfg.initial_step is not None:
            step = cfg.initial_step
        else:
            step = 0.1 * abs(x0[i]) if x0[i] != 0.0 else 0.01
        simplex[i + 1, i] += step
    return simplex


def _nm_run(objective, x0: np.ndarray, f0: float, cfg: OptimizerConfig,
            budget: int) -> NMResult:
    n = x0.size
    simplex = _initial_simplex(x0, cfg)
    fvals = np.empty(n + 1)
    fvals[0] = f0
    for i in range(1, n + 1):
        fvals[i] = objective(simplex[i])
    iters = 0
    converged = False
    while iters < budget:
        iters += 1
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        spread = fvals[-1] - fvals[0]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if spread < cfg.f_tol or diameter < cfg.x_tol:
            converged = True
            break
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = objective(xr)
        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (centroid - worst)
            fe = objective(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + cfg.contraction * (xr - centroid)
            else:
                xc = centroid + cfg.contraction * (worst - centroid)
            fc = objective(xc)
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + cfg.shrink * (simplex[i] - best)
                    fvals[i] = objective(simplex[i])
    best_i = int(np.argmin(fvals))
    return NMResult(simplex[best_i].copy(), float(fvals[best_i]), iters, converged)


def nelder_mead(objective, x0, config: OptimizerConfig | None = None) -> NMResult:
    """Minimize ``objective`` by the downhill simplex method.

    Runs the base search plus ``config.restarts`` re-initializations of a
    fresh simplex at the incumbent, keeping the best point seen (which is
    never worse than ``x0``). Exhausting ``max_iter`` returns
    ``converged=False`` rather than raising.
    """
    cfg = config or OptimizerConfig()
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    if x0.ndim != 1 or x0.size == 0:
        raise FitError("nelder_mead: x0 must be a non-empty vector")
    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise FitError(f"nelder_mead: objective is not finite at the start point ({f0})")
    best_x, best_f = x0.copy(), f0
    total_iters = 0
    converged = False
    for _ in range(cfg.restarts + 1):
        budget = cfg.max_iter - total_iters
        if budget <= 0:
            converged = False
            break
        run = _nm_run(objective, best_x, best_f, cfg, budget)
        total_iters += run.iterations
        converged = run.converged
        if run.f < best_f:
            best_x, best_f = run.x, run.f
    return NMResult(best_x, best_f, total_iters, converged)


# ---------------------------------------------------------------------------
# Parameter transforms
# ---------------------------------------------------------------------------

def _kind(name: str) -> str:
    if name in POSITIVE_PARAMS:
        return "pos"
    if name in AR_COEFFICIENTS:
        return "ar"
    return "free"


def _to_unconstrained(names, values) -> np.ndarray:
    out = np.empty(len(names))
    for i, (n, v) in enumerate(zip(names, values)):
        k = _kind(n)
        if k == "pos":
            out[i] = math.log(v)
        elif k == "ar":
            out[i] = math.atanh(min(max(v, -0.999999), 0.999999))
        else:
            out[i] = v
    return out


def _from_unconstrained(names, u) -> np.ndarray:
    out = np.empty(len(names))
    for i, (n, v) in enumerate(zip(names, u)):
        k = _kind(n)
        if k == "pos":
            out[i] = math.exp(v)
        elif k == "ar":
            out[i] = math.tanh(v)
        else:
            out[i] = v
    return out


# ---------------------------------------------------------------------------
# Likelihood
# ---------------------------------------------------------------------------

def neg_log_likelihood(spec: ModelSpec, params: ParamSet | dict,
                       inputs: FilterInputs,
                       ma_init: float | None = None) -> float:
    """Conditional Gaussian NLL; +inf outside the parameter or data domain."""
    if not isinstance(params, ParamSet):
        params = ParamSet.from_dict(spec, params)
    reason = params_violation(spec, params)
    if reason is not None:
        log.debug("NLL barrier for %s/%s: %s", spec.series, spec.variant, reason)
        return math.inf
    try:
        out = run_filter(spec, params, inputs, ma_init)
    except FilterError as exc:
        log.debug("NLL barrier for %s/%s: %s", spec.series, spec.variant, exc)
        return math.inf
    eps = out.residuals.values
    sigma = params[spec.sigma_name]
    n = eps.size
    value = 0.5 * (n * (_LOG_2PI + 2.0 * math.log(sigma))
                   + float(np.dot(eps, eps)) / (sigma * sigma))
    return value if math.isfinite(value) else math.inf


# ---------------------------------------------------------------------------
# Standard errors
# ---------------------------------------------------------------------------

def _cholesky_inverse(h: np.ndarray) -> np.ndarray | None:
    """Inverse of a symmetric matrix via Cholesky elimination.

    Returns None when a pivot is non-positive (or negligibly small relative
    to the largest diagonal entry), i.e. the matrix is not positive
    definite to working precision.
    """
    n = h.shape[0]
    tol = 1e-12 * max(float(np.max(np.abs(np.diag(h)))), 1e-300)
    lower = np.zeros_like(h)
    for j in range(n):
        pivot = h[j, j] - float(np.dot(lower[j, :j], lower[j, :j]))
        if not math.isfinite(pivot) or pivot <= tol:
            return None
        lower[j, j] = math.sqrt(pivot)
        for i in range(j + 1, n):
            lower[i, j] = (h[i, j] - float(np.dot(lower[i, :j], lower[j, :j]))) \
                / lower[j, j]
    # Solve L L^T X = I by forward then backward substitution.
    eye = np.eye(n)
    y = np.empty_like(eye)
    for k in range(n):
        for i in range(n):
            y[i, k] = (eye[i, k] - float(np.dot(lower[i, :i], y[:i, k]))) / lower[i, i]
    x = np.empty_like(eye)
    for k in range(n):
        for i in range(n - 1, -1, -1):
            x[i, k] = (y[i, k] - float(np.dot(lower[i + 1:, i], x[i + 1:, k]))) \
                / lower[i, i]
    return x


def standard_errors(objective, x_min) -> tuple[np.ndarray | None, str | None]:
    """Asymptotic SEs via an inverse finite-difference observed information.

    ``objective`` must be the NLL as a function of the natural-space free
    parameter vector. Central differences with per-coordinate step
    max(1e-5, 1e-4*|x_i|). On a non-positive-definite or non-finite Hessian
    the SEs are reported absent together with a warning string.
    """
    x = np.asarray(x_min, dtype=np.float64)
    n = x.size
    h = np.maximum(1e-5, 1e-4 * np.abs(x))
    hess = np.empty((n, n))
    f0 = float(objective(x))

    def f_at(offsets):
        return float(objective(x + offsets))

    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h[i]
        hess[i, i] = (f_at(ei) - 2.0 * f0 + f_at(-ei)) / (h[i] * h[i])
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h[j]
            val = (f_at(ei + ej) - f_at(ei - ej) - f_at(-ei + ej) + f_at(-ei - ej)) \
                / (4.0 * h[i] * h[j])
            hess[i, j] = hess[j, i] = val
    if not np.all(np.isfinite(hess)):
        return None, "Hessian has non-finite entries; standard errors unavailable"
    inv = _cholesky_inverse(hess)
    if inv is None:
        return None, ("observed information is not positive definite "
                      "(flat or ill-conditioned direction); standard errors unavailable")
    diag = np.diag(inv)
    if np.any(diag <= 0.0):
        return None, "inverse information has non-positive variances"
    return np.sqrt(diag), None


# ---------------------------------------------------------------------------
# Starting values
# ---------------------------------------------------------------------------

def _lag1_corr(x: np.ndarray) -> float:
    c = x - x.mean()
    denom = float(np.dot(c, c))
    if denom == 0.0:
        return 0.0
    return float(np.dot(c[:-1], c[1:]) / denom)


def _safe_ar(a: float) -> float:
    return min(max(a, -0.9), 0.9)


def _safe_sigma(s: float) -> float:
    return max(s, 1e-6)


def _ar1_start(x: np.ndarray) -> tuple[float, float, float]:
    mu = float(x.mean())
    a = _safe_ar(_lag1_corr(x))
    resid = x[1:] - mu - a * (x[:-1] - mu)
    return mu, a, _safe_sigma(float(np.std(resid)))


_MA_GRID = np.linspace(0.05, 0.95, 19)


def _profiled_ma_start(u: np.ndarray, q: np.ndarray, ma_seed: float,
                       extra: np.ndarray | None = None):
    """Grid-profiled start for the (w, d) inflation-transmission pair.

    Both MA variants reduce to u(t) = mu + w * (m_d(t) - q(t)) [+ c * extra]
    plus serially correlated noise, where m_d is the smoothed inflation level
    at grid value d. OLS at each d gives consistent (mu, w); the d with the
    whitest residuals wins. This avoids the flat ridge at d -> 1 (where the
    regressor collapses and w loses meaning) that traps a simplex started
    from a generic interior point.

    Returns (w, d, mu, c, noise) with c None when ``extra`` is None.
    """
    best = None
    for d in _MA_GRID:
        r = _ma_level(q, float(d), ma_seed) - q
        cols = [np.ones_like(u), r]
        if extra is not None:
            cols.append(extra)
        design = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(design, u, rcond=None)
        noise = u - design @ coef
        a = _safe_ar(_lag1_corr(noise))
        white = noise[1:] - a * noise[:-1]
        sse = float(white @ white)
        if best is None or sse < best[0]:
            c = float(coef[2]) if extra is not None else None
            best = (sse, float(coef[1]), float(d), float(coef[0]), c, noise)
    _, w, d, mu, c, noise = best
    return w, d, mu, c, noise


def moment_start(spec: ModelSpec, inputs: FilterInputs,
                 ma_init: float | None = None) -> dict[str, float]:
    """Method-of-moments starting values; always inside the domain."""
    s, v = spec.series, spec.variant
    x = inputs.primary.values
    start: dict[str, float]
    if s == "inflation":
        mu, a, sig = _ar1_start(x)
        start = {"mu_q": mu, "a_q": a, "sigma_q": sig}
    elif s == "short_rate":
        mu, a, sig = _ar1_start(x)
        start = {"mu_b": mu, "a_b": a, "sigma_b": sig}
    elif s == "dividend_yield":
        if v == "ar1":
            mu, a, sig = _ar1_start(np.log(np.maximum(x, 1e-12)))
            start = {"mu_y": mu, "a_y": a, "sigma_y": sig}
        else:
            if inputs.dq is None:
                raise DataError("dividend_yield/ma_inflation needs the "
                                "inflation series")
            y_s, dq_s = align(inputs.primary, inputs.dq)
            q = dq_s.values
            u = np.log(np.maximum(y_s.values, 1e-12)) - q
            w, d, mu, _, yn = _profiled_ma_start(
                u, q, q[0] if ma_init is None else ma_init)
            a = _safe_ar(_lag1_corr(yn))
            start = {"w_y": w, "d_y": d, "mu_y": mu, "a_y": a,
                     "sigma_y": _safe_sigma(float(np.std(yn[1:] - a * yn[:-1])))}
    elif s == "dividend":
        if v == "yield_only":
            mu = float(x.mean())
            start = {"mu_d": mu, "y_d": 0.0, "k_d": 0.0,
                     "sigma_d": _safe_sigma(float(np.std(x - mu)))}
        elif v == "ma_inflation":
            if inputs.dq is None:
                raise DataError("dividend/ma_inflation needs the inflation "
                                "series")
            dd_s, dq_s = align(inputs.primary, inputs.dq)
            q = dq_s.values
            lagged = np.zeros(len(q))
            if inputs.eps_y is not None:
                for i in range(1, len(q)):
                    year = dd_s.start_year + i - 1
                    if inputs.eps_y.covers(year):
                        lagged[i] = inputs.eps_y.value_in(year)
            w, d, mu, yd, core = _profiled_ma_start(
                dd_s.values - q, q, q[0] if ma_init is None else ma_init,
                extra=lagged)
            k = _safe_ar(_lag1_corr(core))
            start = {"w_d": w, "d_d": d, "mu_d": mu, "y_d": yd, "k_d": k,
                     "sigma_d": _safe_sigma(float(np.std(core[1:] - k * core[:-1])))}
        else:
            probe = ParamSet.from_dict(
                spec, {"q_d": 1.0, "mu_d": 0.0, "y_d": 0.0, "k_d": 0.0,
                       "sigma_d": 1.0})
            out = run_filter(spec, probe, inputs, ma_init)
            core = out.residuals.values  # dd - dqx at zero mean
            mu = float(core.mean())
            start = {"q_d": 1.0, "mu_d": mu, "y_d": 0.0, "k_d": 0.0,
                     "sigma_d": _safe_sigma(float(np.std(core - mu)))}
    elif s == "long_rate":
        if v == "ar1_log":
            ln_c = np.log(np.maximum(x, 1e-12))
            mu, a, sig = _ar1_start(ln_c)
            start = {"mu_c": max(math.exp(mu), 1e-8), "a_c": a, "sigma_c": sig}
        else:
            w = spec.fixed.get("w_c", 1.0)
            d = spec.fixed.get("d_c", 0.13)
            probe = ParamSet.from_dict(
                spec, {"w_c": w, "d_c": d, "mu_c": 1.0, "a_c": 0.0, "sigma_c": 1.0})
            try:
                out = run_filter(spec, probe, inputs, ma_init)
                cn0 = out.states["cn"].values  # ln cr at mu_c = 1
                mu, a, sig = _ar1_start(cn0)
                start = {"w_c": w, "d_c": d, "mu_c": max(math.exp(mu), 1e-8),
                         "a_c": a, "sigma_c": sig}
            except FilterError:
                # Real component non-positive under the (possibly fixed)
                # mixing weights; fall back to a generic interior point.
                start = {"w_c": w, "d_c": d, "mu_c": max(float(np.mean(np.abs(x))), 1e-4),
                         "a_c": 0.5, "sigma_c": 0.3}
    elif s == "ilb":
        mu = float(x.mean())
        a = _safe_ar(_lag1_corr(x))
        resid = x[1:] - mu - a * (x[:-1] - mu)
        start = {"a_r": a, "sigma_r": _safe_sigma(float(np.std(resid)))}
        if "mu_r" in spec.param_names:
            start["mu_r"] = mu
        if "c_r" in spec.param_names:
            start["c_r"] = 0.0
        if "b_r" in spec.param_names:
            start["b_r"] = 0.0
    else:
        raise DataError(f"unknown series {s!r}")
    start.update(spec.fixed)
    return start


# ---------------------------------------------------------------------------
# Fit
# ---------------------------------------------------------------------------

@dataclass
class FitResult:
    spec: ModelSpec
    params: ParamSet
    log_likelihood: float
    n_obs: int
    residuals: AnnualSeries
    standardized_residuals: AnnualSeries
    diagnostics: diagnostics.DiagnosticsReport
    filter_output: FilterOutput
    converged: bool
    iterations: int
    se_warning: str | None = None

    @property
    def final_year(self) -> int:
        return self.filter_output.final_year


def fit(spec: ModelSpec, inputs: FilterInputs, config: OptimizerConfig | None = None,
        n_starts: int = 5, seed: int = 0, ma_init: float | None = None,
        starts: list[dict[str, float]] | None = None) -> FitResult:
    """Calibrate one sub-model by conditional maximum likelihood.

    Multi-start: the method-of-moments point plus ``n_starts - 1`` starts
    jittered deterministically from ``seed`` (in the unconstrained space).
    The best optimum over all starts is kept; if no start converges the fit
    fails. Fixed parameters from ``spec.fixed`` are pinned and reported with
    no standard error.
    """
    cfg = config or OptimizerConfig()
    free = list(spec.free_names)
    primary = inputs.primary.values
    if float(np.ptp(primary)) == 0.0:
        raise DataError(
            f"{spec.series}: modelled series is constant; refusing a degenerate fit")

    base = starts[0] if starts else moment_start(spec, inputs, ma_init)
    base = {**base, **spec.fixed}

    def nll_full(values: dict[str, float]) -> float:
        return neg_log_likelihood(spec, values, inputs, ma_init)

    # Fail early when the aligned window cannot support the parameter count.
    try:
        probe = run_filter(spec, ParamSet.from_dict(spec, base), inputs, ma_init)
        if probe.n_obs < len(free) + 2:
            raise DataError(
                f"{spec.series}/{spec.variant}: {probe.n_obs} usable observations, "
                f"need at least {len(free) + 2}")
    except FilterError:
        pass  # domain failure at the start point; the barrier handles it below

    if not free:
        # Everything pinned: no optimization, just evaluate.
        pset = ParamSet.from_dict(spec, base)
        pset.fixed = frozenset(spec.fixed)
        return _finish(spec, pset, inputs, ma_init, nll_full(base), True, 0, cfg)

    def objective_u(u: np.ndarray) -> float:
        vals = dict(base)
        vals.update(zip(free, _from_unconstrained(free, u)))
        return nll_full(vals)

    u0 = _to_unconstrained(free, [base[n] for n in free])
    start_points = [u0]
    if starts:
        for extra in starts[1:]:
            merged = {**base, **extra, **spec.fixed}
            start_points.append(_to_unconstrained(free, [merged[n] for n in free]))
    else:
        rng = np.random.default_rng([seed & 0xFFFFFFFF, len(free), len(primary)])
        for _ in range(max(0, n_starts - 1)):
            start_points.append(u0 + 0.25 * rng.standard_normal(len(free)))

    best: NMResult | None = None
    n_finite = 0
    total_iters = 0
    for u_start in start_points:
        if not math.isfinite(objective_u(u_start)):
            continue
        n_finite += 1
        run = nelder_mead(objective_u, u_start, cfg)
        total_iters += run.iterations
        if best is None or (run.converged and not best.converged) \
                or (run.converged == best.converged and run.f < best.f):
            best = run
    if n_finite == 0:
        raise FitError(
            f"{spec.series}/{spec.variant}: objective not finite at any start point")
    if best is None or not math.isfinite(best.f):
        raise FitError(f"{spec.series}/{spec.variant}: optimization failed")
    if not best.converged:
        raise FitError(
            f"{spec.series}/{spec.variant}: no start converged within "
            f"{cfg.max_iter} iterations")

    values = dict(base)
    values.update(zip(free, _from_unconstrained(free, best.x)))
    pset = ParamSet.from_dict(spec, values)
    pset.fixed = frozenset(spec.fixed)
    return _finish(spec, pset, inputs, ma_init, best.f, best.converged,
                   total_iters, cfg)


def _finish(spec: ModelSpec, pset: ParamSet, inputs: FilterInputs,
            ma_init: float | None, nll_min: float, converged: bool,
            iterations: int, cfg: OptimizerConfig) -> FitResult:
    out = run_filter(spec, pset, inputs, ma_init)
    n_obs = out.n_obs
    min_needed = len(spec.free_names) + 2
    if n_obs < min_needed:
        raise DataError(
            f"{spec.series}/{spec.variant}: {n_obs} usable observations, "
            f"need at least {min_needed}")

    free = list(spec.free_names)
    se_warning = None
    ses_by_name: dict[str, float] = {}
    if free:
        base_vals = pset.as_dict()

        def nll_free(x: np.ndarray) -> float:
            vals = dict(base_vals)
            vals.update(zip(free, x))
            return neg_log_likelihood(spec, vals, inputs, ma_init)

        ses, se_warning = standard_errors(nll_free, [base_vals[n] for n in free])
        if ses is not None:
            ses_by_name = dict(zip(free, ses))
        if se_warning:
            log.warning("%s/%s: %s", spec.series, spec.variant, se_warning)
    se_arr = np.array([ses_by_name.get(n, np.nan) for n in pset.names])
    pset.std_errors = se_arr if ses_by_name else None

    sigma = pset[spec.sigma_name]
    std = AnnualSeries(out.residuals.start_year, out.residuals.values / sigma,
                       out.residuals.unit, "standardized_residuals")
    try:
        report = diagnostics.residual_report(std)
    except DataError as exc:
        raise DataError(f"{spec.series}/{spec.variant}: degenerate residuals "
                        f"({exc}); the input series carries no usable "
                        f"variation") from exc
    return FitResult(spec=spec, params=pset, log_likelihood=-nll_min, n_obs=n_obs,
                     residuals=out.residuals, standardized_residuals=std,
                     diagnostics=report, filter_output=out, converged=converged,
                     iterations=iterations, se_warning=se_warning)


# ---------------------------------------------------------------------------
# Recursive (stability) fits
# ---------------------------------------------------------------------------

@dataclass
class StabilityRow:
    bound_year: int
    first_year: int
    last_year: int
    n_window: int
    estimates: dict[str, float]
    std_errors: dict[str, float | None]
    converged: bool


@dataclass
class StabilityTable:
    series: str
    variant: str
    direction: str
    min_obs: int
    warm_start: bool
    param_names: tuple[str, ...]
    rows: list[StabilityRow] = field(default_factory=list)

    def ci_bounds(self, row: StabilityRow, name: str) -> tuple[float | None, float | None]:
        se = row.std_errors.get(name)
        if se is None:
            return None, None
        est = row.estimates[name]
        return est - 1.96 * se, est + 1.96 * se


def recursive_fit(spec: ModelSpec, window_inputs, years: tuple[int, int],
                  direction: str, min_obs: int,
                  config: OptimizerConfig | None = None, n_starts: int = 5,
                  seed: int = 0, warm_start: bool = True,
                  ma_init: float | None = None) -> StabilityTable:
    """Parameter-stability fits on expanding sub-periods.

    Parameters
    ----------
    window_inputs : callable ``(first_year, last_year) -> FilterInputs``
        builder for the sub-period's aligned inputs (this lets cascade
        dependents refit their upstream model per window).
    years : (first, last) year range of the modelled series.
    direction : ``expanding_end`` grows the sample forward from the first
        year; ``expanding_start`` shrinks the start year back from the last.
    min_obs : smallest window length (observation count of the modelled
        series) that is fitted.
    warm_start : each window starts at the previous window's estimate; with
        ``False`` every window starts independently from its own
        method-of-moments point (the order-independent mode).
    """
    if direction not in ("expanding_end", "expanding_start"):
        raise DataError(f"unknown direction {direction!r}")
    first, last = years
    n_total = last - first + 1
    floor_obs = len(spec.free_names) + 2
    if min_obs < floor_obs:
        raise DataError(f"min_obs must be at least {floor_obs} for "
                        f"{spec.series}/{spec.variant}, got {min_obs}")
    if min_obs > n_total:
        raise DataError(
            f"min_obs={min_obs} exceeds the {n_total} available observations")

    if direction == "expanding_end":
        windows = [(first, end) for end in range(first + min_obs - 1, last + 1)]
    else:
        windows = [(start, last) for start in
                   range(last - min_obs + 1, first - 1, -1)]

    table = StabilityTable(spec.series, spec.variant, direction, min_obs,
                           warm_start, spec.param_names)
    prev_estimate: dict[str, float] | None = None
    for lo, hi in windows:
        inputs = window_inputs(lo, hi)
        starts = None
        if warm_start and prev_estimate is not None:
            starts = [dict(prev_estimate)]
        try:
            res = fit(spec, inputs, config=config, n_starts=n_starts,
                      seed=seed, ma_init=ma_init, starts=starts)
            estimates = res.params.as_dict()
            ses = {n: res.params.std_error(n) if n not in spec.fixed else None
                   for n in spec.param_names}
            converged = res.converged
            if warm_start:
                prev_estimate = estimates
        except (FitError, FilterError) as exc:
            log.warning("stability window %s-%s failed: %s", lo, hi, exc)
            estimates = {n: math.nan for n in spec.param_names}
            ses = {n: None for n in spec.param_names}
            converged = False
        bound = hi if direction == "expanding_end" else lo
        table.rows.append(StabilityRow(bound, lo, hi, hi - lo + 1,
                                       estimates, ses, converged))
    return table
