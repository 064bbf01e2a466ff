"""Scenario configuration and ground-plane geometry.

Everything downstream works in SI units: meters, radians, watts. The JSON
boundary is the only place where dBm and degrees appear.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

PER_USER = "per-user"
PER_PAIR = "per-pair"
EXPONENT_CONVENTIONS = (PER_USER, PER_PAIR)
REGIONS = ("disk", "square")


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


class GeometryError(ValueError):
    """A geometric quantity was requested outside its domain."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt) + 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Physical and experiment parameters of one deployment.

    ``tx_power`` and ``noise_power`` are in watts and the oblique angles in
    radians; see :func:`config_from_dict` for the dBm/degree JSON fields.
    """

    frequency: float = 1e9
    bs_height: float = 10.0
    bs_coverage_radius: float = 100.0
    user_count: int = 2000
    d2d_max: float = 10.0
    tx_power: float = 1.0
    noise_power: float = 1e-12
    uca_elements: int = 8
    uca_radius: float = 0.5
    mode_set: tuple[int, ...] = (1, 2)
    ring_half_width: float = 0.5
    oblique_phi: float = 0.0
    oblique_psi: float = 0.0
    pairing_exponent_convention: str = PER_USER
    region: str = "disk"
    square_side: float = 200.0
    baseline_separation: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "mode_set", tuple(int(m) for m in self.mode_set))
        if not self.frequency > 0:
            raise ConfigError(f"frequency must be positive, got {self.frequency}")
        if self.bs_height < 0:
            raise ConfigError(f"bs_height must be >= 0, got {self.bs_height}")
        if not self.bs_coverage_radius > 0:
            raise ConfigError("bs_coverage_radius must be positive")
        if not 0 < self.ring_half_width < self.bs_coverage_radius:
            raise ConfigError(
                "ring_half_width must lie in (0, bs_coverage_radius), "
                f"got {self.ring_half_width}"
            )
        if not 0 < self.d2d_max <= 2 * self.bs_coverage_radius:
            raise ConfigError("d2d_max must lie in (0, 2 * bs_coverage_radius]")
        if self.user_count < 0 or int(self.user_count) != self.user_count:
            raise ConfigError("user_count must be a nonnegative integer")
        if not self.mode_set or any(m == 0 for m in self.mode_set):
            raise ConfigError("mode_set must contain nonzero integers")
        if self.tx_power <= 0 or self.noise_power <= 0:
            raise ConfigError("powers must be positive")
        if self.uca_elements < 1 or self.uca_radius <= 0:
            raise ConfigError("UCA needs at least one element and a positive radius")
        if self.pairing_exponent_convention not in EXPONENT_CONVENTIONS:
            raise ConfigError(
                f"pairing_exponent_convention must be one of {EXPONENT_CONVENTIONS}"
            )
        if self.region not in REGIONS:
            raise ConfigError(f"region must be one of {REGIONS}")
        if self.square_side <= 0 or self.baseline_separation <= 0:
            raise ConfigError("square_side and baseline_separation must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def max_mode(self) -> int:
        """Largest |l| in the mode set; it sets the binding feasibility radius."""
        return max(abs(m) for m in self.mode_set)

    @property
    def uca_central_angle(self) -> float:
        return 2 * math.pi / self.uca_elements

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _int(v) -> int:
    if isinstance(v, bool) or float(v) != int(v):
        raise ValueError(f"not an integer: {v!r}")
    return int(v)


# JSON field name -> (attribute, converter into SI)
_JSON_FIELDS: dict[str, tuple[str, Any]] = {
    "frequency": ("frequency", float),
    "bs_height": ("bs_height", float),
    "bs_coverage_radius": ("bs_coverage_radius", float),
    "user_count": ("user_count", _int),
    "d2d_max": ("d2d_max", float),
    "tx_power": ("tx_power", float),
    "tx_power_dbm": ("tx_power", dbm_to_watt),
    "noise_power": ("noise_power", float),
    "noise_power_dbm": ("noise_power", dbm_to_watt),
    "uca_elements": ("uca_elements", _int),
    "uca_radius": ("uca_radius", float),
    "mode_set": ("mode_set", lambda v: tuple(_int(m) for m in v)),
    "ring_half_width": ("ring_half_width", float),
    "oblique_phi": ("oblique_phi", float),
    "oblique_phi_deg": ("oblique_phi", lambda v: math.radians(float(v))),
    "oblique_psi": ("oblique_psi", float),
    "oblique_psi_deg": ("oblique_psi", lambda v: math.radians(float(v))),
    "pairing_exponent_convention": ("pairing_exponent_convention", str),
    "region": ("region", str),
    "square_side": ("square_side", float),
    "baseline_separation": ("baseline_separation", float),
}
JSON_KEYS = tuple(_JSON_FIELDS) + ("wavelength",)


def config_from_dict(doc: Mapping[str, Any], base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a config from JSON-style fields, failing on any unknown key.

    Powers may be given in watts (``tx_power``) or dBm (``tx_power_dbm``) and
    oblique angles in radians or degrees (``oblique_phi_deg``), but not both.
    ``wavelength`` may be given for readability but must agree with
    ``frequency`` to 1e-9 relative.
    """
    unknown = sorted(set(doc) - set(JSON_KEYS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    changes = {}
    for key, value in doc.items():
        if key == "wavelength":
            continue
        attr, conv = _JSON_FIELDS[key]
        if attr in changes:
            raise ConfigError(f"{attr} given twice (SI and dBm/degree forms)")
        try:
            changes[attr] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    cfg = dataclasses.replace(base or ScenarioConfig(), **changes)
    if "wavelength" in doc:
        lam = float(doc["wavelength"])
        if not math.isclose(lam, cfg.wavelength, rel_tol=1e-9):
            raise ConfigError(
                f"wavelength {lam} disagrees with frequency (expected {cfg.wavelength})"
            )
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    """SI-valued JSON document; ``config_from_dict`` of it reproduces ``cfg`` exactly."""
    return {
        "frequency": cfg.frequency,
        "bs_height": cfg.bs_height,
        "bs_coverage_radius": cfg.bs_coverage_radius,
        "user_count": cfg.user_count,
        "d2d_max": cfg.d2d_max,
        "tx_power": cfg.tx_power,
        "noise_power": cfg.noise_power,
        "uca_elements": cfg.uca_elements,
        "uca_radius": cfg.uca_radius,
        "mode_set": list(cfg.mode_set),
        "ring_half_width": cfg.ring_half_width,
        "oblique_phi": cfg.oblique_phi,
        "oblique_psi": cfg.oblique_psi,
        "pairing_exponent_convention": cfg.pairing_exponent_convention,
        "region": cfg.region,
        "square_side": cfg.square_side,
        "baseline_separation": cfg.baseline_separation,
    }


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(doc)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float = field(default=0.0)

    def __post_init__(self):
        if self.r < 0:
            raise GeometryError(f"radius must be >= 0, got {self.r}")
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))

    @property
    def xy(self) -> tuple[float, float]:
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta)


def chord_distance(u: PolarPoint, v: PolarPoint) -> float:
    """Planar distance between two ground points."""
    # 2 r1 r2 (1 - cos) is written with sin^2 to stay accurate for small angles
    dtheta = u.theta - v.theta
    s = math.sin(dtheta / 2)
    sq = (u.r - v.r) ** 2 + 4 * u.r * v.r * s * s
    return math.sqrt(max(sq, 0.0))


def beam_axis_length(r_s, d, H):
    """Length from the UCA center to the midpoint of a chord of length ``d``.

    Works on scalars or arrays. Raises :class:`GeometryError` when the chord
    cannot exist (negative radicand).
    """
    rad = np.asarray(r_s, dtype=float) ** 2 - np.asarray(d, dtype=float) ** 2 / 4 + np.asarray(H, dtype=float) ** 2
    if np.any(rad < 0):
        raise GeometryError("chord longer than the geometry allows (negative radicand)")
    out = np.sqrt(rad)
    return float(out) if out.ndim == 0 else out
