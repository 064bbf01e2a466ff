"""Laguerre-Gaussian beam physics for the p = 0 OAM beam and its waist design."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# above this |l| the normalization and r^|l| factor are evaluated in log domain
_LOG_DOMAIN_MODE = 20


class InfeasibleTargetError(ValueError):
    """No real waist radius puts the intensity ring at the requested radius."""


@dataclass(frozen=True)
class Beam:
    mode: int
    waist_radius: float
    wavelength: float
    radial_index: int = 0

    def __post_init__(self):
        if self.mode == 0:
            raise ValueError("OAM mode must be nonzero")
        if self.radial_index < 0:
            raise ValueError("radial index must be >= 0")
        if not (self.waist_radius > 0 and self.wavelength > 0):
            raise ValueError("waist radius and wavelength must be positive")

    @property
    def rayleigh_range(self) -> float:
        return math.pi * self.waist_radius**2 / self.wavelength

    @property
    def wave_number(self) -> float:
        return 2 * math.pi / self.wavelength

    def beam_radius(self, z):
        return self.waist_radius * np.sqrt(1.0 + (np.asarray(z, dtype=float) / self.rayleigh_range) ** 2)


def laguerre_polynomial(p: int, alpha: int, x):
    """Associated Laguerre polynomial L_p^alpha(x) by three-term recurrence."""
    if p < 0 or alpha < 0:
        raise ValueError("p and alpha must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for k in range(2, p + 1):
        prev, cur = cur, ((2 * k - 1 + alpha - x) * cur - (k - 1 + alpha) * prev) / k
    return cur if cur.ndim else float(cur)


def _radial_envelope(ell: int, p: int, r, w):
    """sqrt(2 p!/(pi w^2 (p+|l|)!)) * (sqrt2 r/w)^|l| * exp(-r^2/w^2)."""
    a = abs(ell)
    rho = np.sqrt(2.0) * r / w
    if a <= _LOG_DOMAIN_MODE:
        norm = np.sqrt(2.0 * math.factorial(p) / (math.pi * w**2 * math.factorial(p + a)))
        return norm * rho**a * np.exp(-(r**2) / w**2)
    with np.errstate(divide="ignore"):
        log_rho = np.log(rho)
    log_norm = 0.5 * (math.log(2.0) + math.lgamma(p + 1) - math.log(math.pi) - 2 * np.log(w) - math.lgamma(p + a + 1))
    return np.exp(log_norm + a * log_rho - r**2 / w**2)


def lg_amplitude(beam: Beam, r, theta, z):
    """Complex field U_{p,l}(r, theta, z) of the LG beam along the z axis."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    z = np.asarray(z, dtype=float)
    ell, p = beam.mode, beam.radial_index
    zr = beam.rayleigh_range
    w = beam.beam_radius(z)
    radial = _radial_envelope(ell, p, r, w) * laguerre_polynomial(p, abs(ell), 2 * r**2 / w**2)
    phase = (
        ell * theta
        + beam.wave_number * r**2 * z / (2 * (z**2 + zr**2))
        - (2 * p + abs(ell) + 1) * np.arctan(z / zr)
    )
    out = radial * np.exp(1j * phase)
    return complex(out) if out.ndim == 0 else out


def lg_intensity(beam: Beam, r, z):
    """Intensity of the p = 0 OAM beam; integrates to one over the transverse plane."""
    if beam.radial_index != 0:
        raise ValueError("closed-form OAM intensity only holds for radial index p = 0")
    r = np.asarray(r, dtype=float)
    w = beam.beam_radius(z)
    a = abs(beam.mode)
    if a <= _LOG_DOMAIN_MODE:
        out = 2.0 / (math.pi * w**2 * math.factorial(a)) * (np.sqrt(2.0) * r / w) ** (2 * a) * np.exp(-2 * r**2 / w**2)
    else:
        out = _radial_envelope(beam.mode, 0, r, w) ** 2
    return float(out) if np.ndim(out) == 0 else out


def max_intensity_radius(beam: Beam, z):
    """Radius of the bright ring, sqrt(|l|/2) w(z)."""
    return math.sqrt(abs(beam.mode) / 2) * beam.beam_radius(z)


def peak_intensity(beam: Beam, z):
    """Intensity on the bright ring, 2 |l|^|l| e^-|l| / (pi w^2 |l|!)."""
    a = abs(beam.mode)
    w = beam.beam_radius(z)
    log_ratio = a * math.log(a) - a - math.lgamma(a + 1)
    return 2.0 * math.exp(log_ratio) / (math.pi * w**2)


def feasible_radius(z, lam, ell):
    """Smallest ring radius reachable at distance ``z`` by any waist choice."""
    return np.sqrt(np.asarray(z, dtype=float) * lam * abs(ell) / math.pi)


def waist_from_target_radius(r_target: float, z: float, lam: float, ell: int) -> float:
    """Smaller waist radius whose bright ring sits at ``r_target`` at distance ``z``.

    With a = r^2/|l| and b = z lam/pi the waist satisfies w0^2 = a -+ sqrt(a^2 - b^2);
    the minus root is returned in the cancellation-free form b / sqrt(a + sqrt(a^2 - b^2)).
    At z = 0 the minus root degenerates to zero, so the unique waist
    r_target * sqrt(2/|l|) is returned instead.
    """
    if r_target <= 0:
        raise InfeasibleTargetError("target radius must be positive")
    a = r_target**2 / abs(ell)
    b = z * lam / math.pi
    if z == 0:
        return math.sqrt(2 * a)
    disc = a * a - b * b
    if disc < 0:
        # accept rounding noise when the target sits on the feasibility boundary
        if disc < -1e-12 * a * a:
            raise InfeasibleTargetError(
                f"target radius {r_target} below feasible radius {feasible_radius(z, lam, ell)}"
            )
        disc = 0.0
    return b / math.sqrt(a + math.sqrt(disc))
