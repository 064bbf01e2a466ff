"""Ring-based cooperative-user pair selection.

Users sit on the ground plane around the BS. The search sweeps rings of
half-width eps at radii eps, 3 eps, 5 eps, ... and keeps same-ring pairs
whose chord d lies in [2 R_fea(z_c), D_max]. Among them the shortest chord
wins. When a sweep finds nothing, eps doubles; the search gives up once
eps exceeds the coverage radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .beam import feasible_radius, waist_from_target_radius
from .scenario import PolarPoint, ScenarioConfig

PAIR_FOUND = "pair_found"
NO_PAIR = "no_pair"


@dataclass(frozen=True)
class UserField:
    """K user positions in polar coordinates around the BS ground point."""

    r: np.ndarray
    theta: np.ndarray
    seed: int | None = None
    region: str = "disk"
    extent: float = 0.0  # disk radius or square side

    def __len__(self):
        return len(self.r)

    def point(self, k: int) -> PolarPoint:
        return PolarPoint(float(self.r[k]), float(self.theta[k]))

    @property
    def positions(self) -> list[PolarPoint]:
        return [self.point(k) for k in range(len(self))]

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.r * np.cos(self.theta), self.r * np.sin(self.theta)])

    @classmethod
    def from_points(cls, points, **kw) -> "UserField":
        pts = [p if isinstance(p, PolarPoint) else PolarPoint(*p) for p in points]
        return cls(
            r=np.array([p.r for p in pts], dtype=float),
            theta=np.array([p.theta for p in pts], dtype=float),
            **kw,
        )


def generate_field(cfg: ScenarioConfig, seed) -> UserField:
    """Scatter ``cfg.user_count`` users uniformly over the configured region.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; equal seeds
    give identical fields.
    """
    rng = np.random.default_rng(seed)
    k = cfg.user_count
    if cfg.region == "disk":
        r = cfg.bs_coverage_radius * np.sqrt(rng.random(k))
        theta = 2 * np.pi * rng.random(k)
        extent = cfg.bs_coverage_radius
    else:
        half = cfg.square_side / 2
        x = rng.uniform(-half, half, k)
        y = rng.uniform(-half, half, k)
        r = np.hypot(x, y)
        theta = np.mod(np.arctan2(y, x), 2 * np.pi)
        extent = cfg.square_side
    int_seed = seed if isinstance(seed, (int, np.integer)) else None
    return UserField(r=r, theta=theta, seed=int_seed, region=cfg.region, extent=extent)


@dataclass(frozen=True)
class SearchRing:
    r_s: float
    epsilon: float

    @property
    def inner(self) -> float:
        return self.r_s - self.epsilon

    @property
    def outer(self) -> float:
        return self.r_s + self.epsilon

    def contains(self, r):
        return (r >= self.inner) & (r <= self.outer)


def ring_count(radius: float, eps: float) -> int:
    """Number of search radii eps, 3 eps, ... not exceeding radius - eps."""
    if eps > radius - eps:
        return 0
    # (2n + 1) eps <= radius - eps  <=>  n + 1 <= radius / (2 eps)
    return int(math.floor(radius / (2 * eps) + 1e-9))


def ring(n: int, eps: float) -> SearchRing:
    return SearchRing((2 * n + 1) * eps, eps)


def potential_users(field: UserField, ring: SearchRing) -> set[int]:
    """Indices of users whose radius lies inside the closed ring."""
    return set(np.flatnonzero(ring.contains(field.r)).tolist())


def iteration_bound(radius: float, eps: float) -> tuple[int, int]:
    """Worst-case (rings per sweep, number of sweeps) of the search."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil(radius / (2 * eps)), math.ceil(math.log2(1 + radius / eps))


@dataclass(frozen=True)
class SelectionResult:
    status: str
    cu_indices: tuple[int, int] | None = None
    ring: SearchRing | None = None
    chord: float = math.nan
    z_c: float = math.nan
    waist_radius: float = math.nan
    waist_by_mode: dict[int, float] = field(default_factory=dict)
    epsilon: float = math.nan
    iterations_inner: int = 0
    iterations_outer: int = 0

    @property
    def found(self) -> bool:
        return self.status == PAIR_FOUND

    @property
    def found_at_initial_epsilon(self) -> bool:
        """Pair found in the first sweep, i.e. at the configured ring half-width."""
        return self.found and self.iterations_outer == 1


def _candidate_pairs(field: UserField, cfg: ScenarioConfig):
    """All user pairs with chord <= D_max that meet the feasibility window.

    The window depends on the pair only (z_c uses the mean CU radius), so it
    is evaluated once and reused by every sweep.
    """
    inside = np.flatnonzero(field.r <= cfg.bs_coverage_radius)
    if len(inside) < 2:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    xy = field.xy[inside]
    tree = cKDTree(xy)
    pairs = tree.query_pairs(cfg.d2d_max * (1 + 1e-9), output_type="ndarray")
    if len(pairs) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    i = inside[pairs[:, 0]]
    j = inside[pairs[:, 1]]
    k1, k2 = np.minimum(i, j), np.maximum(i, j)
    d = np.hypot(*(field.xy[k1] - field.xy[k2]).T)
    r_mid = 0.5 * (field.r[k1] + field.r[k2])
    z_c = np.sqrt(np.maximum(r_mid**2 - d**2 / 4 + cfg.bs_height**2, 0.0))
    ok = (d <= cfg.d2d_max) & (d >= 2 * feasible_radius(z_c, cfg.wavelength, cfg.max_mode))
    return k1[ok], k2[ok], d[ok]


def _shared_ring(ra, rb, eps, n_rings):
    """Lowest ring index containing both radii, or -1."""
    lo, hi = np.minimum(ra, rb), np.maximum(ra, rb)
    base = np.floor(lo / (2 * eps)).astype(np.int64)
    out = np.full(lo.shape, -1, dtype=np.int64)
    for shift in (1, 0, -1):
        n = base - shift
        rs = (2 * n + 1) * eps
        ok = (n >= 0) & (n < n_rings) & (lo >= rs - eps) & (hi <= rs + eps) & (out < 0)
        out[ok] = n[ok]
    return out


def select_pair(field: UserField, cfg: ScenarioConfig, max_sweeps: int | None = None) -> SelectionResult:
    """Run the ring search on ``field``; failure is reported as ``no_pair``.

    ``max_sweeps`` caps the number of eps values tried (1 means no doubling).
    """
    k1, k2, d = _candidate_pairs(field, cfg)
    radius = cfg.bs_coverage_radius
    eps = cfg.ring_half_width
    inner = outer = 0
    while eps <= radius and (max_sweeps is None or outer < max_sweeps):
        outer += 1
        n_rings = ring_count(radius, eps)
        inner += n_rings
        if len(d) and n_rings:
            which = _shared_ring(field.r[k1], field.r[k2], eps, n_rings)
            hit = np.flatnonzero(which >= 0)
            if len(hit):
                best = hit[np.lexsort((k2[hit], k1[hit], d[hit]))[0]]
                return _finish(field, cfg, int(k1[best]), int(k2[best]), float(d[best]),
                               ring(int(which[best]), eps), inner, outer)
        eps *= 2
    return SelectionResult(NO_PAIR, iterations_inner=inner, iterations_outer=outer, epsilon=eps)


def _finish(field, cfg, a, b, d, found_ring, inner, outer) -> SelectionResult:
    r_mid = 0.5 * (field.r[a] + field.r[b])
    z_c = math.sqrt(max(r_mid**2 - d * d / 4 + cfg.bs_height**2, 0.0))
    lam = cfg.wavelength
    waists = {m: waist_from_target_radius(d / 2, z_c, lam, m) for m in cfg.mode_set}
    top = max(cfg.mode_set, key=abs)
    return SelectionResult(
        PAIR_FOUND,
        cu_indices=(a, b),
        ring=found_ring,
        chord=d,
        z_c=z_c,
        waist_radius=waists[top],
        waist_by_mode=waists,
        epsilon=found_ring.epsilon,
        iterations_inner=inner,
        iterations_outer=outer,
    )
