"""Residual-resampling surrogate data and significance verdicts.

Two null hypotheses are covered. H1 (no causality, no autonomy beyond
chance): the target surrogate is driven by a self-past-only autoregression,
so any driver-target dependence in the original data is destroyed. H2 (no
autonomy): the target surrogate is driven by the driver's past alone. In
both cases the driver surrogate keeps its full fitted equation (own and
target past), the fitted residuals are permuted without replacement
independently per channel, and the pair is regenerated jointly from zero
initial conditions with a 100-sample burn-in.

Verdict rules on the surrogate distribution of each measure: causality is
significant above the upper ``1 - alpha`` percentile, isolation below the
lower ``alpha`` percentile, autonomy outside the two-sided
``alpha/2 .. 1 - alpha/2`` band. Percentiles interpolate linearly between
order statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .restricted import AR_ON_Y, X_ON_Y
from .timeseries import TimeSeriesPair
from .varmodel import UnstableModelError, lagged_design, companion_matrix

SURROGATE_BURN_IN = 100

H1 = "h1"
H2 = "h2"

# measure -> (required hypothesis, rejection tail)
TAILS = {
    "gc": (H1, "upper"),
    "gi": (H1, "lower"),
    "ga": (H2, "two-sided"),
}


@dataclass(frozen=True)
class SurrogateConfig:
    """Surrogate count, test level, seed, and null hypothesis."""

    n_surrogates: int = 100
    alpha: float = 0.05
    seed: int = 0
    hypothesis: str = H1

    def __post_init__(self) -> None:
        if self.n_surrogates < 2:
            raise ValueError(f"need at least 2 surrogates, got {self.n_surrogates}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.hypothesis not in (H1, H2):
            raise ValueError(f"hypothesis must be {H1!r} or {H2!r}, got {self.hypothesis!r}")


@dataclass
class SignificanceVerdict:
    """Outcome of one surrogate comparison."""

    measure: str
    scope: str
    original: float
    thresholds: dict[str, float]
    tail: str
    significant: bool

    def to_dict(self) -> dict:
        def num(v: float):
            return "inf" if np.isinf(v) else float(v)

        return {
            "measure": self.measure,
            "scope": self.scope,
            "original": num(self.original),
            "thresholds": {k: num(v) for k, v in self.thresholds.items()},
            "tail": self.tail,
            "significant": bool(self.significant),
        }


def _lstsq_row(design: np.ndarray, target: np.ndarray, what: str) -> tuple[np.ndarray, np.ndarray]:
    sol, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise ValueError(f"rank-deficient regression while fitting {what}")
    return sol, target - design @ sol


def fit_driver_row(
    x: np.ndarray, y: np.ndarray, p: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Least-squares fit of the driver equation on the joint past.

    Returns ``(a_xx, a_xy, residuals)`` with ``p`` lags each.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size <= 3 * p:
        raise ValueError(f"series too short ({x.size}) for driver fit at order {p}")
    design = lagged_design([x, y], p)
    sol, resid = _lstsq_row(design, x[p:], "the driver equation")
    return sol[:p], sol[p:], resid


def fit_restricted_direct(
    x: np.ndarray, y: np.ndarray, kind: str, q: int = 20
) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares restricted fit of the target directly on data.

    ``kind`` selects the regressor past: ``"ar_on_y"`` uses the target's own
    past, ``"x_on_y"`` the driver's past. Returns ``(coeffs, residuals)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kind not in (AR_ON_Y, X_ON_Y):
        raise ValueError(f"unknown restricted model kind {kind!r}")
    if y.size <= 2 * q:
        raise ValueError(f"series too short ({y.size}) for restricted fit at {q} lags")
    source = y if kind == AR_ON_Y else x
    design = lagged_design([source], q)
    coeffs, resid = _lstsq_row(design, y[q:], f"the {kind} regression")
    return coeffs, resid


def _cyclic(values: np.ndarray, length: int) -> np.ndarray:
    reps = -(-length // values.size)
    return np.tile(values, reps)[:length]


def generate_surrogates(
    pair: TimeSeriesPair, config: SurrogateConfig, p: int, q: int = 20
) -> list[TimeSeriesPair]:
    """Surrogate pairs consistent with the configured null hypothesis.

    The driver equation is fitted at order ``p`` and the null target
    equation at ``q`` lags; each surrogate permutes both residual series
    (independently, without replacement) and regenerates the pair jointly.
    Surrogate ``i`` draws from the RNG stream keyed by ``(seed, i)``, so
    results are reproducible and order-independent.
    """
    a_xx, a_xy, u = fit_driver_row(pair.x, pair.y, p)
    target_kind = AR_ON_Y if config.hypothesis == H1 else X_ON_Y
    b, v = fit_restricted_direct(pair.x, pair.y, target_kind, q)

    m = max(p, q)
    coeffs = np.zeros((m, 2, 2))
    coeffs[:p, 0, 0] = a_xx
    coeffs[:p, 0, 1] = a_xy
    if config.hypothesis == H1:
        coeffs[:q, 1, 1] = b
    else:
        coeffs[:q, 1, 0] = b
    rho = np.abs(np.linalg.eigvals(companion_matrix(coeffs))).max()
    if rho >= 1.0:
        raise UnstableModelError(
            f"fitted surrogate generator is unstable (spectral radius {rho:.6g}); "
            "cannot produce surrogates for this record"
        )

    n = pair.n
    total = SURROGATE_BURN_IN + n
    out = []
    for i in range(config.n_surrogates):
        rng = np.random.default_rng((config.seed, i))
        u_perm = rng.permutation(u)
        v_perm = rng.permutation(v)
        # burn-in reuses the permuted residuals cyclically, the retained
        # stretch restarts them from the beginning
        u_drive = np.concatenate([_cyclic(u_perm, SURROGATE_BURN_IN), _cyclic(u_perm, n)])
        v_drive = np.concatenate([_cyclic(v_perm, SURROGATE_BURN_IN), _cyclic(v_perm, n)])
        xs = np.zeros(m + total)
        ys = np.zeros(m + total)
        for t in range(total):
            x_hist = xs[t : t + m][::-1]
            y_hist = ys[t : t + m][::-1]
            xs[t + m] = a_xx @ x_hist[:p] + a_xy @ y_hist[:p] + u_drive[t]
            if config.hypothesis == H1:
                ys[t + m] = b @ y_hist[:q] + v_drive[t]
            else:
                ys[t + m] = b @ x_hist[:q] + v_drive[t]
        out.append(
            TimeSeriesPair(
                xs[m + SURROGATE_BURN_IN :], ys[m + SURROGATE_BURN_IN :], pair.fs
            )
        )
    return out


def significance_test(
    measure: str,
    scope: str,
    original: float,
    surrogate_values: np.ndarray,
    config: SurrogateConfig,
) -> SignificanceVerdict:
    """Compare one original measure value against its surrogate distribution.

    ``measure`` fixes both the required hypothesis and the rejection tail;
    a mismatch with ``config.hypothesis`` is an error. An infinite original
    isolation value can never be significantly low.
    """
    if measure not in TAILS:
        raise ValueError(f"unknown measure {measure!r}; choose from {sorted(TAILS)}")
    needed, tail = TAILS[measure]
    if config.hypothesis != needed:
        raise ValueError(
            f"measure {measure!r} requires {needed} surrogates, "
            f"config provides {config.hypothesis}"
        )
    values = np.asarray(surrogate_values, dtype=float)
    if values.ndim != 1 or values.size != config.n_surrogates:
        raise ValueError(
            f"expected {config.n_surrogates} surrogate values, got shape {values.shape}"
        )
    alpha = config.alpha
    if tail == "upper":
        hi = float(np.percentile(values, 100 * (1 - alpha)))
        thresholds = {f"{100 * (1 - alpha):g}": hi}
        significant = original > hi
    elif tail == "lower":
        lo = float(np.percentile(values, 100 * alpha))
        thresholds = {f"{100 * alpha:g}": lo}
        significant = original < lo
    else:
        lo = float(np.percentile(values, 100 * alpha / 2))
        hi = float(np.percentile(values, 100 * (1 - alpha / 2)))
        thresholds = {f"{100 * alpha / 2:g}": lo, f"{100 * (1 - alpha / 2):g}": hi}
        significant = original < lo or original > hi
    return SignificanceVerdict(
        measure=measure,
        scope=scope,
        original=float(original),
        thresholds=thresholds,
        tail=tail,
        significant=significant,
    )
