"""Closed-form achievable-rate bounds for the Gaussian two-way relay channel.

Implements the general hybrid analog/digital region over (alpha, beta,
sigma2), its compress-forward (nnc), amplify-forward (af) and digital-hybrid
special cases, a derived cutset reference, deterministic parameter
optimization and the node-distance sweep used for comparison plots.

All rates are in bits per transmission.  The general-region formulas are
implemented verbatim as printed in the source material, including the
(1 - alpha) factor in the second numerator; `beta_variant=True` substitutes
beta there for exploration only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .search import coordinate_descent_triangle, golden_refine

SIGMA2_GRID_LO = 1e-3
SIGMA2_GRID_HI = 1e6
SIGMA2_GRID_POINTS = 120
AF_SIGMA2_LIMIT = 1e8
ALPHA_BETA_STEP = 0.02


@dataclass(frozen=True)
class GaussianTwrcParams:
    """Received SNRs (linear scale) of a Gaussian two-way relay network.

    S_jk is the SNR at node j of the signal from node k.  When gains and
    power are supplied, S_jk = g_jk^2 * P must hold within 1e-9.
    """

    S13: float
    S23: float
    S31: float
    S32: float
    P: float | None = None
    gains: dict | None = None

    def __post_init__(self):
        for name in ("S13", "S23", "S31", "S32"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.gains is not None:
            if self.P is None or self.P <= 0:
                raise ValueError("gains require a positive power P")
            for name, g in self.gains.items():
                snr = getattr(self, name.replace("g", "S"))
                if abs(g * g * self.P - snr) > 1e-9 * max(1.0, snr):
                    raise ValueError(f"inconsistent gain/SNR pair for {name}")

    @staticmethod
    def from_gains(g13: float, g23: float, g31: float, g32: float, P: float) -> "GaussianTwrcParams":
        return GaussianTwrcParams(
            S13=g13 * g13 * P,
            S23=g23 * g23 * P,
            S31=g31 * g31 * P,
            S32=g32 * g32 * P,
            P=P,
            gains={"g13": g13, "g23": g23, "g31": g31, "g32": g32},
        )


@dataclass(frozen=True)
class SchemeParams:
    alpha: float
    beta: float
    sigma2: float

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.alpha + self.beta > 1.0 + 1e-12:
            raise ValueError("alpha + beta must not exceed 1")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")


@dataclass(frozen=True)
class RatePoint:
    R1: float
    R2: float
    scheme: str
    binding: tuple[int, int]
    clamped: bool = False

    @property
    def sum_rate(self) -> float:
        return self.R1 + self.R2


def gauss_c(x: float) -> float:
    """Gaussian capacity function C(x) = 0.5 * log2(1 + x)."""
    if x < 0:
        raise ValueError("argument must be nonnegative")
    return 0.5 * math.log2(1.0 + x)


def _clamp_pair(r1_terms, r2_terms, scheme: str) -> RatePoint:
    b1 = int(np.argmin(r1_terms))
    b2 = int(np.argmin(r2_terms))
    r1, r2 = r1_terms[b1], r2_terms[b2]
    clamped = r1 < 0 or r2 < 0
    return RatePoint(max(r1, 0.0), max(r2, 0.0), scheme, (b1, b2), clamped)


def _hc_direction(Sa: float, Sb: float, S31: float, S32: float,
                  alpha: float, beta: float, sigma2: float,
                  beta_variant: bool) -> tuple[float, float]:
    """The two rate expressions of the general region for one direction.

    For R1 pass (Sa, Sb) = (S23, S31); for R2 pass (S13, S32).  The printed
    formulas for R2 mirror R1 with those substitutions.
    """
    T = S31 + S32 + 1.0
    mix = math.sqrt(alpha / T) + math.sqrt(beta * sigma2)
    mix_up = math.sqrt(alpha * (Sb + 1.0) / T) + math.sqrt(beta * sigma2)

    num1 = (alpha * Sa * (Sb + 1.0) / T + beta * Sa + 1.0) * (Sb + 1.0 + sigma2) \
        - Sa * mix_up * mix_up
    den1 = (alpha * Sa / T + beta * Sa + 1.0) * (1.0 + sigma2) - Sa * mix * mix
    expr1 = 0.5 * math.log2(num1 / den1)

    second_coef = beta if beta_variant else (1.0 - alpha)
    num2 = (alpha * Sa * (Sb + 1.0) / T + second_coef * Sa + 1.0) * (1.0 + sigma2)
    den2 = den1
    expr2 = 0.5 * math.log2(num2 / den2) - gauss_c(1.0 / sigma2)
    return expr1, expr2


def hc_general_rates(ch: GaussianTwrcParams, sp: SchemeParams,
                     beta_variant: bool = False) -> RatePoint:
    """General hybrid-coding rate corner for given (alpha, beta, sigma2)."""
    r1 = _hc_direction(ch.S23, ch.S31, ch.S31, ch.S32,
                       sp.alpha, sp.beta, sp.sigma2, beta_variant)
    r2 = _hc_direction(ch.S13, ch.S32, ch.S31, ch.S32,
                       sp.alpha, sp.beta, sp.sigma2, beta_variant)
    return _clamp_pair(r1, r2, "hc_general")


def nnc_rates(ch: GaussianTwrcParams, sigma2: float) -> RatePoint:
    """Compress-forward (noisy network coding) corner at quantizer noise sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    pen = gauss_c(1.0 / sigma2)
    r1 = (gauss_c(ch.S31 / (1.0 + sigma2)), gauss_c(ch.S23) - pen)
    r2 = (gauss_c(ch.S32 / (1.0 + sigma2)), gauss_c(ch.S13) - pen)
    return _clamp_pair(r1, r2, "nnc")


def af_rates(ch: GaussianTwrcParams) -> RatePoint:
    """Amplify-forward corner (no free parameters)."""
    r1 = gauss_c(ch.S23 * ch.S31 / (1.0 + ch.S23 + ch.S31 + ch.S32))
    r2 = gauss_c(ch.S13 * ch.S32 / (1.0 + ch.S13 + ch.S31 + ch.S32))
    return RatePoint(r1, r2, "af", (0, 0))


def hc_special_rates(ch: GaussianTwrcParams, sigma2: float) -> RatePoint:
    """Digital-hybrid corner (alpha = 0, beta = 1) at quantizer noise sigma2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    pen = gauss_c(1.0 / sigma2)
    r1 = (
        gauss_c(ch.S31 * (1.0 + ch.S23) / (1.0 + sigma2 + ch.S23)),
        gauss_c(ch.S23 * sigma2 / (1.0 + sigma2 + ch.S23)) - pen,
    )
    r2 = (
        gauss_c(ch.S32 * (1.0 + ch.S13) / (1.0 + sigma2 + ch.S13)),
        gauss_c(ch.S13 * sigma2 / (1.0 + sigma2 + ch.S13)) - pen,
    )
    return _clamp_pair(r1, r2, "hc_special")


def cutset_rates(ch: GaussianTwrcParams) -> RatePoint:
    """Derived reference outer bound from the standard two-cut argument.

    Not taken from the source material (which only plots it); labeled as a
    derived reference in all outputs.
    """
    r1 = min(gauss_c(ch.S31), gauss_c(ch.S23))
    r2 = min(gauss_c(ch.S32), gauss_c(ch.S13))
    b1 = 0 if gauss_c(ch.S31) <= gauss_c(ch.S23) else 1
    b2 = 0 if gauss_c(ch.S32) <= gauss_c(ch.S13) else 1
    return RatePoint(r1, r2, "cutset (derived reference, not from source)", (b1, b2))


@dataclass(frozen=True)
class OptimizedScheme:
    scheme: str
    params: SchemeParams | None
    point: RatePoint
    sum_rate: float


def _log_sigma_grid() -> np.ndarray:
    return np.logspace(math.log10(SIGMA2_GRID_LO), math.log10(SIGMA2_GRID_HI),
                       SIGMA2_GRID_POINTS)


def _optimize_sigma(f) -> tuple[float, float]:
    """Coarse log-grid argmax over sigma2 refined by golden section in log-space."""
    grid = _log_sigma_grid()
    vals = [f(s) for s in grid]
    i = int(np.argmax(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if lo == hi:
        return float(grid[i]), float(vals[i])
    x, v, _ = golden_refine(lambda t: f(math.exp(t)), math.log(lo), math.log(hi),
                            tol=1e-10, max_iter=200)
    if v >= vals[i]:
        return float(math.exp(x)), float(v)
    return float(grid[i]), float(vals[i])


def optimize_scheme(ch: GaussianTwrcParams, scheme: str,
                    beta_variant: bool = False) -> OptimizedScheme:
    """Deterministically maximize the sum rate over the scheme's free parameters."""
    if scheme == "af":
        pt = af_rates(ch)
        return OptimizedScheme("af", None, pt, pt.sum_rate)
    if scheme == "cutset":
        pt = cutset_rates(ch)
        return OptimizedScheme("cutset", None, pt, pt.sum_rate)
    if scheme == "nnc":
        s2, v = _optimize_sigma(lambda s: nnc_rates(ch, s).sum_rate)
        pt = nnc_rates(ch, s2)
        return OptimizedScheme("nnc", SchemeParams(0.0, 0.0, s2), pt, v)
    if scheme == "hc_special":
        s2, v = _optimize_sigma(lambda s: hc_special_rates(ch, s).sum_rate)
        pt = hc_special_rates(ch, s2)
        return OptimizedScheme("hc_special", SchemeParams(0.0, 1.0, s2), pt, v)
    if scheme == "hc_general":
        return _optimize_general(ch, beta_variant)
    raise ValueError(f"unknown scheme {scheme!r}")


def _general_sum(ch, alpha, beta, sigma2, beta_variant) -> float:
    return hc_general_rates(ch, SchemeParams(alpha, beta, sigma2), beta_variant).sum_rate


def _optimize_general(ch: GaussianTwrcParams, beta_variant: bool) -> OptimizedScheme:
    step = ALPHA_BETA_STEP
    n = int(round(1.0 / step))
    sgrid = _log_sigma_grid()
    best = (-1.0, 0.0, 0.0, sgrid[0])
    for ia in range(n + 1):
        alpha = ia * step
        for ib in range(n - ia + 1):
            beta = ib * step
            for s2 in sgrid[::6]:
                v = _general_sum(ch, alpha, beta, s2, beta_variant)
                if v > best[0]:
                    best = (v, alpha, beta, s2)
    _, alpha, beta, s2 = best
    # Refine sigma2 at the incumbent (alpha, beta), then (alpha, beta) by
    # coordinate descent, then sigma2 once more.
    s2, _ = _optimize_sigma(lambda s: _general_sum(ch, alpha, beta, s, beta_variant))
    (alpha, beta), _ = coordinate_descent_triangle(
        lambda a, b: _general_sum(ch, a, b, s2, beta_variant),
        (alpha, beta), steps=(step, step / 4, step / 20))
    s2, v = _optimize_sigma(lambda s: _general_sum(ch, alpha, beta, s, beta_variant))
    params = SchemeParams(alpha, beta, s2)
    pt = hc_general_rates(ch, params, beta_variant)
    return OptimizedScheme("hc_general", params, pt, pt.sum_rate)


def params_from_distance(r: float, P: float = 10.0, path_loss_exp: float = 3.0) -> GaussianTwrcParams:
    """Relay at distance r from node 1 on the unit segment; amplitude gains
    r_jk^(-path_loss_exp / 2)."""
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie strictly between 0 and 1")
    e = path_loss_exp / 2.0
    g13 = g31 = r ** (-e)
    g23 = g32 = (1.0 - r) ** (-e)
    return GaussianTwrcParams.from_gains(g13, g23, g31, g32, P)


def fig8_sweep(P: float = 10.0, r_grid=None, path_loss_exp: float = 3.0) -> list[dict]:
    """Sum-rate comparison of cutset / af / nnc / digital-hybrid versus
    relay position r.  Returns rows with keys r, R_CS, R_AF, R_NNC, R_HC."""
    if r_grid is None:
        r_grid = [round(0.05 * i, 10) for i in range(1, 20)]
    rows = []
    for r in r_grid:
        ch = params_from_distance(r, P, path_loss_exp)
        rows.append({
            "r": float(r),
            "R_CS": cutset_rates(ch).sum_rate,
            "R_AF": af_rates(ch).sum_rate,
            "R_NNC": optimize_scheme(ch, "nnc").sum_rate,
            "R_HC": optimize_scheme(ch, "hc_special").sum_rate,
        })
    return rows


def sweep_to_csv(rows: list[dict]) -> str:
    lines = ["r,R_CS,R_AF,R_NNC,R_HC"]
    for row in rows:
        lines.append("%.6f,%.6f,%.6f,%.6f,%.6f" % (
            row["r"], row["R_CS"], row["R_AF"], row["R_NNC"], row["R_HC"]))
    return "\n".join(lines) + "\n"
