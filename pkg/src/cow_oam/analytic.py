"""Closed-form cooperative formation probability.

Users are uniform on the coverage disk. A given pair cooperates when both
users share a search ring and their chord lies in [D_min(r_s), D_max].
Summing that probability over the ring tiling gives the per-pair
probability P_c, and P_COW = 1 - (1 - P_c)^E, where E is either the user
count (the published form) or the number of distinct pairs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .scenario import PER_PAIR, ScenarioConfig
from .selection import ring_count

log = logging.getLogger(__name__)


def ring_probability(r_s, eps, R_BS):
    """Probability that one uniform user falls in the ring at ``r_s``."""
    r_s = np.asarray(r_s, dtype=float)
    tol = 1e-9 * R_BS
    if eps <= 0 or np.any(r_s < eps - tol) or np.any(r_s > R_BS - eps + tol):
        raise ValueError("ring must satisfy 0 < eps <= r_s <= R_BS - eps")
    out = 4 * r_s * eps / R_BS**2
    return float(out) if out.ndim == 0 else out


def min_pair_distance(r_s, cfg: ScenarioConfig):
    """Shortest chord for which a waist exists, as a function of ring radius."""
    c = cfg.wavelength * cfg.max_mode / math.pi
    r_s = np.asarray(r_s, dtype=float)
    s4 = 4 * (cfg.bs_height**2 + r_s**2)
    # sqrt(c^2 + 4S) - c without cancellation for small S
    inner = s4 / (np.sqrt(c * c + s4) + c)
    out = np.sqrt(2 * c * inner)
    return float(out) if out.ndim == 0 else out


def min_feasible_radius(cfg: ScenarioConfig) -> float:
    """R_min = R_fea(H); below it the shortest chord exceeds the ring diameter."""
    return math.sqrt(cfg.bs_height * cfg.wavelength * cfg.max_mode / math.pi)


def crossover_radius(cfg: ScenarioConfig) -> float:
    """R_v, the ring radius where D_min reaches D_max (0 if it never does)."""
    dm = cfg.d2d_max
    lam, ell = cfg.wavelength, cfg.max_mode
    sq = math.pi**2 * dm**4 / (16 * lam**2 * ell**2) + (dm / 2) ** 2 - cfg.bs_height**2
    return math.sqrt(sq) if sq > 0 else 0.0


def _chord_angle(chord, r_s):
    # 2 asin(D / 2r) equals acos((2r^2 - D^2) / 2r^2) and stays accurate for short chords
    ratio = np.clip(chord / (2 * r_s), 0.0, 1.0)
    return 2 * np.arcsin(ratio)


def angle_window(r_s, cfg: ScenarioConfig):
    """(theta_min, theta_max) subtended by D_min and D_max on the ring.

    Chords longer than the diameter are clamped to pi.
    """
    r_s = np.asarray(r_s, dtype=float)
    if np.any(r_s <= 0):
        raise ValueError("ring radius must be positive")
    th_min = _chord_angle(min_pair_distance(r_s, cfg), r_s)
    th_max = _chord_angle(cfg.d2d_max, r_s)
    if th_min.ndim == 0:
        return float(th_min), float(th_max)
    return th_min, th_max


def distance_condition_probability(r_s, cfg: ScenarioConfig):
    """Probability that two uniform users on the ring meet the chord window."""
    scalar = np.ndim(r_s) == 0
    r_s = np.atleast_1d(np.asarray(r_s, dtype=float))
    out = np.zeros(r_s.shape)
    pos = r_s > 0
    th_min, th_max = angle_window(np.where(pos, r_s, 1.0), cfg)
    r_lo = min_feasible_radius(cfg)
    r_top = min(crossover_radius(cfg), cfg.bs_coverage_radius)
    half = cfg.d2d_max / 2
    first = pos & (r_s >= r_lo) & (r_s <= half)
    second = pos & (r_s > half) & (r_s <= r_top)
    out[first] = (np.pi - th_min[first]) / np.pi
    out[second] = (th_max[second] - th_min[second]) / np.pi
    np.clip(out, 0.0, 1.0, out=out)
    return float(out[0]) if scalar else out


def pairing_exponent(cfg: ScenarioConfig, convention: str | None = None) -> float:
    k = cfg.user_count
    if (convention or cfg.pairing_exponent_convention) == PER_PAIR:
        return k * (k - 1) / 2
    return float(k)


@dataclass(frozen=True)
class FormationProbabilityBreakdown:
    ring_radii: np.ndarray
    p_r: np.ndarray
    p_s: np.ndarray
    d_min: np.ndarray
    theta_min: np.ndarray
    theta_max: np.ndarray
    p_d: np.ndarray
    r_min: float
    r_v: float
    r_max_search: float
    p_c: float
    exponent: float
    p_cow: float


def cow_probability(p_c: float, exponent: float) -> float:
    """1 - (1 - p_c)^E, evaluated without cancellation."""
    if exponent == 0 or p_c == 0:
        return 0.0
    if p_c >= 1:
        return 1.0
    return -math.expm1(exponent * math.log1p(-p_c))


def formation_probability(cfg: ScenarioConfig, convention: str | None = None) -> FormationProbabilityBreakdown:
    eps, radius = cfg.ring_half_width, cfg.bs_coverage_radius
    n = ring_count(radius, eps)
    rs = (2 * np.arange(n) + 1) * eps
    p_r = ring_probability(rs, eps, radius) if n else np.empty(0)
    p_s = p_r**2
    p_d = distance_condition_probability(rs, cfg)
    d_min = min_pair_distance(rs, cfg)
    if n:
        th_min, th_max = angle_window(rs, cfg)
        impossible = d_min > 2 * rs
        if impossible.any():
            log.debug("%d rings have D_min above the ring diameter; P_d set to 0", impossible.sum())
    else:
        th_min = th_max = np.empty(0)
    p_c = math.fsum(p_s * p_d)
    exponent = pairing_exponent(cfg, convention)
    r_v = crossover_radius(cfg)
    return FormationProbabilityBreakdown(
        ring_radii=rs, p_r=p_r, p_s=p_s, d_min=np.asarray(d_min), theta_min=np.asarray(th_min),
        theta_max=np.asarray(th_max), p_d=np.asarray(p_d), r_min=min_feasible_radius(cfg),
        r_v=r_v, r_max_search=min(r_v, radius), p_c=p_c, exponent=exponent,
        p_cow=cow_probability(p_c, exponent),
    )
