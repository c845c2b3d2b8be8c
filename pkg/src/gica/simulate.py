"""Benchmark stochastic processes with known causal structure.

All systems are built from AR(2) blocks with poles placed at chosen
normalized frequencies (driver at 0.3 with modulus 0.9, target at 0.1 with
modulus ``0.8 b``, confounder at 0.2 with modulus 0.8) plus lag-1 coupling
terms. Unit-variance Gaussian innovations drive every equation.

Systems
-------
``open_loop``
    Driver X feeds the target Y with weight ``-c``; no feedback.
``closed_loop``
    Adds feedback ``-d`` from Y into the X equation.
``confounded``
    Three processes; a latent Z feeds Y with weight ``-a`` alongside a
    fixed ``-0.8`` drive from X, and only (X, Y) are returned.
``benchmark``
    The four-setting matrix (i: b=0,c=0; ii: b=1,c=0; iii: b=0,c=1;
    iv: b=1,c=1) used for estimator validation, as open-loop instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .restricted import RestrictedModel, restricted_ar, restricted_x
from .spectral import (
    DEFAULT_BANDS,
    FrequencyGrid,
    MeasureReport,
    SpectralProfile,
    band_table,
    directed_coherence,
    psd,
    spectral_ga,
    spectral_gc,
    spectral_gi,
    time_domain_measures,
)
from .timeseries import TimeSeriesPair
from .varmodel import (
    BivariateVarModel,
    UnstableModelError,
    companion_matrix,
    compute_autocovariance,
    fit_var,
    poles_to_ar_coeffs,
    select_order_aic,
)

BURN_IN = 1000

DRIVER_POLE = (0.9, 0.3)
TARGET_POLE_MODULUS = 0.8
TARGET_POLE_FREQ = 0.1
CONFOUNDER_POLE = (0.8, 0.2)
CONFOUNDED_XY_COUPLING = 0.8

BENCHMARK_SETTINGS = {
    "i": (0.0, 0.0),
    "ii": (1.0, 0.0),
    "iii": (0.0, 1.0),
    "iv": (1.0, 1.0),
}

SYSTEMS = ("open_loop", "closed_loop", "confounded", "benchmark")


@dataclass(frozen=True)
class SimSpec:
    """Choice of system, parameters, length, and seed for one realization.

    ``b`` scales the target's autonomous pole modulus, ``c`` the driver
    coupling, ``d`` the feedback (closed loop only), ``a`` the confounder
    coupling (confounded only). ``setting`` selects a benchmark column.
    """

    system: str
    n: int
    seed: int | tuple[int, ...] = 0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    a: float = 0.0
    setting: str | None = None

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}; choose from {SYSTEMS}")
        if self.n < 1:
            raise ValueError(f"length must be >= 1, got {self.n}")
        for name in ("b", "c", "d", "a"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"parameter {name} must lie in [0, 1], got {value}")
        if self.system == "benchmark":
            if self.setting not in BENCHMARK_SETTINGS:
                raise ValueError(
                    f"benchmark requires setting in {sorted(BENCHMARK_SETTINGS)}, "
                    f"got {self.setting!r}"
                )
        elif self.setting is not None:
            raise ValueError(f"setting is only valid for the benchmark system")

    def effective_bc(self) -> tuple[float, float]:
        if self.system == "benchmark":
            return BENCHMARK_SETTINGS[self.setting]
        return self.b, self.c


def _target_poles(b: float) -> tuple[float, float]:
    return poles_to_ar_coeffs(TARGET_POLE_MODULUS * b, TARGET_POLE_FREQ)


def build_true_model(spec: SimSpec) -> BivariateVarModel:
    """Exact bivariate parameters of a two-process system.

    Raises for the confounded system, whose observed pair has no finite
    autoregressive representation; use :func:`build_confounded_system` for
    its full three-process parameters.
    """
    if spec.system == "confounded":
        raise ValueError(
            "the observed (X, Y) pair of the confounded system is not a finite "
            "bivariate AR process; simulate and estimate instead"
        )
    b, c = spec.effective_bc()
    ax1, ax2 = poles_to_ar_coeffs(*DRIVER_POLE)
    ay1, ay2 = _target_poles(b)
    a1 = np.array([[ax1, -spec.d], [-c, ay1]])
    a2 = np.array([[ax2, 0.0], [0.0, ay2]])
    model = BivariateVarModel(np.stack([a1, a2]), np.eye(2))
    model.require_stable()
    return model


def build_confounded_system(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients ``(2, 3, 3)`` and innovation covariance of the X, Y, Z system."""
    ax1, ax2 = poles_to_ar_coeffs(*DRIVER_POLE)
    ay1, ay2 = _target_poles(b)
    az1, az2 = poles_to_ar_coeffs(*CONFOUNDER_POLE)
    a1 = np.array(
        [
            [ax1, 0.0, 0.0],
            [-CONFOUNDED_XY_COUPLING, ay1, -a],
            [0.0, 0.0, az1],
        ]
    )
    a2 = np.diag([ax2, ay2, az2])
    coeffs = np.stack([a1, a2])
    rho = np.abs(np.linalg.eigvals(companion_matrix(coeffs))).max()
    if rho >= 1.0:
        raise UnstableModelError(f"confounded system unstable: radius {rho:.6g}")
    return coeffs, np.eye(3)


def _shift1(series: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], series[:-1]))


def _ar2_filter(a1: float, a2: float, drive: np.ndarray) -> np.ndarray:
    # s_n = a1 s_{n-1} + a2 s_{n-2} + drive_n, zero initial conditions
    return lfilter([1.0], [1.0, -a1, -a2], drive)


def simulate(spec: SimSpec) -> TimeSeriesPair:
    """One seed-deterministic realization of length ``spec.n``.

    A 1000-sample burn-in from zero initial conditions is generated and
    discarded. Unit sampling rate is attached.
    """
    total = BURN_IN + spec.n
    rng = np.random.default_rng(spec.seed)
    if spec.system == "confounded":
        build_confounded_system(spec.a, spec.b)  # stability gate
        noise = rng.standard_normal((total, 3))
        ax1, ax2 = poles_to_ar_coeffs(*DRIVER_POLE)
        ay1, ay2 = _target_poles(spec.b)
        az1, az2 = poles_to_ar_coeffs(*CONFOUNDER_POLE)
        x = _ar2_filter(ax1, ax2, noise[:, 0])
        z = _ar2_filter(az1, az2, noise[:, 2])
        drive = (
            -CONFOUNDED_XY_COUPLING * _shift1(x) - spec.a * _shift1(z) + noise[:, 1]
        )
        y = _ar2_filter(ay1, ay2, drive)
        return TimeSeriesPair(x[BURN_IN:], y[BURN_IN:], 1.0)

    model = build_true_model(spec)
    noise = rng.standard_normal((total, 2))
    if spec.system == "closed_loop" and spec.d != 0.0:
        x, y = _simulate_loop(model, noise)
    else:
        b, c = spec.effective_bc()
        ax1, ax2 = poles_to_ar_coeffs(*DRIVER_POLE)
        ay1, ay2 = _target_poles(b)
        x = _ar2_filter(ax1, ax2, noise[:, 0])
        y = _ar2_filter(ay1, ay2, -c * _shift1(x) + noise[:, 1])
    return TimeSeriesPair(x[BURN_IN:], y[BURN_IN:], 1.0)


def _simulate_loop(model: BivariateVarModel, noise: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # general recursion for systems with feedback; zero initial conditions
    p = model.p
    total = noise.shape[0]
    s = np.zeros((total + p, 2))
    coeffs = model.coeffs
    for t in range(total):
        acc = noise[t].copy()
        for k in range(1, p + 1):
            acc += coeffs[k - 1] @ s[t + p - k]
        s[t + p] = acc
    return s[p:, 0], s[p:, 1]


def theoretical_profiles(
    spec: SimSpec,
    grid: FrequencyGrid | None = None,
    q: int = 20,
    bands: dict[str, tuple[float, float]] | None = None,
) -> tuple[dict[str, SpectralProfile], MeasureReport]:
    """All spectral profiles and the measure report from exact parameters."""
    if grid is None:
        grid = FrequencyGrid.default()
    if bands is None:
        bands = DEFAULT_BANDS
    model = build_true_model(spec)
    gammas = compute_autocovariance(model, q)
    rest_ar = restricted_ar(gammas, q)
    rest_x = restricted_x(gammas, q)
    return assemble_profiles(model, rest_ar, rest_x, grid, bands)


def assemble_profiles(
    model: BivariateVarModel,
    rest_ar: RestrictedModel,
    rest_x: RestrictedModel,
    grid: FrequencyGrid,
    bands: dict[str, tuple[float, float]],
    warnings: list[str] | None = None,
) -> tuple[dict[str, SpectralProfile], MeasureReport]:
    """Compute every profile and the band/time-domain report for one model."""
    px, py, pcross = psd(model, grid)
    dc_yx, dc_yy = directed_coherence(model, grid)
    gc = spectral_gc(model, grid)
    gi = spectral_gi(model, grid)
    ga_shape, ga, _ = spectral_ga(model, rest_x, grid)
    profiles = {
        prof.measure_name: prof
        for prof in (px, py, pcross, dc_yx, dc_yy, gc, gi, ga_shape, ga)
    }
    f_xy, f_y, a_y = time_domain_measures(model, rest_ar, rest_x, grid)
    report = MeasureReport(
        f_xy=f_xy,
        f_y=f_y,
        a_y=a_y,
        bands=band_table(profiles, bands),
        warnings=list(warnings or []),
    )
    return profiles, report


def theoretical_sweep(
    base: SimSpec,
    param: str,
    values: list[float],
    grid: FrequencyGrid | None = None,
    q: int = 20,
    bands: dict[str, tuple[float, float]] | None = None,
) -> list[tuple[float, dict[str, SpectralProfile], MeasureReport]]:
    """Theoretical profiles for each value of one swept parameter."""
    if param not in ("b", "c", "d"):
        raise ValueError(f"sweep parameter must be b, c, or d, got {param!r}")
    out = []
    for value in values:
        spec = SimSpec(
            system=base.system,
            n=base.n,
            seed=base.seed,
            b=value if param == "b" else base.b,
            c=value if param == "c" else base.c,
            d=value if param == "d" else base.d,
            a=base.a,
            setting=base.setting,
        )
        profiles, report = theoretical_profiles(spec, grid, q, bands)
        out.append((value, profiles, report))
    return out


def run_confounded_study(
    a: float,
    b: float,
    n_runs: int = 100,
    n: int = 500,
    seed: int = 0,
    grid: FrequencyGrid | None = None,
    p_max: int = 14,
    q: int = 20,
) -> tuple[dict[str, SpectralProfile], int]:
    """Average estimated causality/isolation/autonomy over repeated runs.

    Each run simulates the confounded system, fits a bivariate model on the
    observed (X, Y) with AIC order selection, and computes the spectral
    measures; profiles are averaged pointwise. Runs whose fit fails the
    stability gates are skipped; more than 5% failures aborts.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    if grid is None:
        grid = FrequencyGrid.default()
    sums = {name: np.zeros(grid.n_points) for name in ("gc", "gi", "ga")}
    failures = 0
    for run in range(n_runs):
        spec = SimSpec(system="confounded", n=n, seed=(seed, run), a=a, b=b)
        pair = simulate(spec)
        try:
            order = select_order_aic(pair.x, pair.y, p_max)
            model = fit_var(pair.x, pair.y, order).diagonalized()
            gammas = compute_autocovariance(model, q)
            rest_x = restricted_x(gammas, q)
            sums["gc"] += spectral_gc(model, grid).values
            sums["gi"] += spectral_gi(model, grid).values
            sums["ga"] += spectral_ga(model, rest_x, grid)[1].values
        except (UnstableModelError, ValueError, np.linalg.LinAlgError):
            failures += 1
    if failures > 0.05 * n_runs:
        raise RuntimeError(
            f"confounded study aborted: {failures}/{n_runs} runs failed the fit gates"
        )
    used = n_runs - failures
    profiles = {
        name: SpectralProfile(grid, sums[name] / used, name) for name in sums
    }
    return profiles, failures
