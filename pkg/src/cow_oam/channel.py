"""Two-mode OAM channel between the BS UCA and a cooperative pair.

Two channel descriptions live here:

* the mode-domain matrix G (modes x CUs) whose entries are OAM beam
  intensities at the CU offsets; it drives demultiplexing, water-filling
  and spectrum efficiency;
* an antenna-domain line-of-sight matrix H (CUs x UCA elements) with exact
  element-to-CU distances, used for oblique misalignment and beam steering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beam import Beam, feasible_radius, lg_intensity, waist_from_target_radius
from .scenario import ScenarioConfig
from .selection import SelectionResult, UserField


class MuxOrthogonalityError(ValueError):
    """Mode rows of the multiplexing matrix are not orthogonal."""


def gain_element(ell: int, r_k: float, z_c: float, beam: Beam) -> float:
    """Intensity of mode ``ell`` at transverse offset ``r_k`` on the beam axis distance ``z_c``."""
    return lg_intensity(Beam(ell, beam.waist_radius, beam.wavelength), r_k, z_c)


def gain_matrix(modes, cu_offsets, z_c: float, waist: float, lam: float) -> np.ndarray:
    beam = Beam(modes[0], waist, lam)
    return np.array([[gain_element(m, r, z_c, beam) for r in cu_offsets] for m in modes])


def mux_matrix(modes, cu_angles, tol: float = 1e-9) -> np.ndarray:
    """Partial-arc sampling rows q(l)_k = exp(i l phi_k) / sqrt(K_c)."""
    modes = np.asarray(modes)
    angles = np.asarray(cu_angles, dtype=float)
    if len(modes) != len(angles):
        raise ValueError("need as many CU angles as modes")
    q = np.exp(1j * np.outer(modes, angles)) / np.sqrt(len(angles))
    gram = q @ q.conj().T
    off = np.abs(gram - np.diag(np.diag(gram)))
    if off.max(initial=0.0) > tol:
        raise MuxOrthogonalityError(
            f"modes {modes.tolist()} are not separable at angles {angles.tolist()} "
            f"(|<q_i, q_j>| = {off.max():.3g})"
        )
    return q


def effective_gain(q: np.ndarray, G: np.ndarray) -> complex:
    """q G q^H for one demultiplexing row."""
    return complex(q @ G @ q.conj())


def effective_gains(G: np.ndarray, Q: np.ndarray) -> np.ndarray:
    return np.array([effective_gain(q, G) for q in Q])


def mode_eigenvalues(G: np.ndarray) -> np.ndarray:
    """Eigenvalues of G sorted by real part (diagnostic counterpart of the effective gains)."""
    ev = np.linalg.eigvals(G)
    return ev[np.argsort(ev.real, kind="stable")]


@dataclass(frozen=True)
class WaterFilling:
    powers: np.ndarray
    level: float
    degenerate: bool = False


def water_filling(gains, total_power: float, sigma2: float) -> WaterFilling:
    """Capacity-optimal split of ``total_power`` over parallel channels.

    ``gains`` are power gains |g|^2. Channels are dropped weakest-first until
    the water level clears every remaining floor sigma2/|g|^2.
    """
    if total_power <= 0 or sigma2 <= 0:
        raise ValueError("power and noise must be positive")
    g = np.asarray(gains, dtype=float)
    if np.any(g < 0):
        raise ValueError("gains must be nonnegative")
    powers = np.zeros(g.shape)
    # gains so small that the floor overflows cannot carry power
    with np.errstate(divide="ignore", over="ignore"):
        all_floors = np.where(g > 0, sigma2 / np.where(g > 0, g, 1.0), np.inf)
    live = np.flatnonzero(np.isfinite(all_floors))
    if len(live) == 0:
        return WaterFilling(powers, math.nan, degenerate=True)
    live = live[np.argsort(-g[live], kind="stable")]
    floors = all_floors[live]
    n = len(live)
    while True:
        level = (total_power + floors[:n].sum()) / n
        if level > floors[n - 1] or n == 1:
            break
        n -= 1
    powers[live[:n]] = level - floors[:n]
    # absorb rounding so the allocation sums to the budget
    powers[live[0]] += total_power - powers.sum()
    return WaterFilling(powers, float(level))


def spectrum_efficiency(powers, gains, sigma2: float):
    """Per-mode log2(1 + P |g|^2 / sigma2) and their total, in bit/s/Hz."""
    per_mode = np.log2(1 + np.asarray(powers) * np.asarray(gains) / sigma2)
    return per_mode, float(per_mode.sum())


def steering_vectors(cfg: ScenarioConfig, z_c: float, r_max: float, n_cu: int):
    """Transmit (length M) and receive (length K_c) phase-compensation vectors.

    ``z_c`` is unused by the phases themselves; ``r_max`` is the ring radius at z_c.
    """
    lam = cfg.wavelength
    m = np.arange(cfg.uca_elements)
    k = np.arange(n_cu)
    # cos(x - pi/2) = sin x and cos(x + pi/2) = -sin x, exact at x = 0
    v = 2 * np.pi * cfg.uca_radius / lam * np.sin(2 * np.pi * m / cfg.uca_elements) * np.sin(cfg.oblique_psi)
    t = -2 * np.pi * r_max / lam * np.sin(2 * np.pi * k / n_cu) * np.sin(cfg.oblique_phi)
    return np.exp(-1j * v), np.exp(-1j * t)


def antenna_channel(cfg: ScenarioConfig, z_c: float, cu_offset: float, n_cu: int = 2,
                    tilt_psi: float | None = None, tilt_phi: float | None = None) -> np.ndarray:
    """Free-space LoS matrix H[k, m] = lam / (4 pi d) exp(-i 2 pi d / lam).

    Frame: UCA centered at the origin facing +z, CUs on a circle of radius
    ``cu_offset`` at distance ``z_c``. The UCA is tilted by psi and the CU
    plane by phi, both about the x axis.
    """
    lam = cfg.wavelength
    psi = cfg.oblique_psi if tilt_psi is None else tilt_psi
    phi = cfg.oblique_phi if tilt_phi is None else tilt_phi
    am = 2 * np.pi * np.arange(cfg.uca_elements) / cfg.uca_elements
    R = cfg.uca_radius
    tx = np.column_stack([R * np.cos(am), R * np.sin(am) * np.cos(psi), R * np.sin(am) * np.sin(psi)])
    ak = 2 * np.pi * np.arange(n_cu) / n_cu
    rx = np.column_stack([
        cu_offset * np.cos(ak),
        cu_offset * np.sin(ak) * np.cos(phi),
        z_c + cu_offset * np.sin(ak) * np.sin(phi),
    ])
    d = np.linalg.norm(rx[:, None, :] - tx[None, :, :], axis=2)
    return lam / (4 * np.pi * d) * np.exp(-2j * np.pi * d / lam)


def uca_mode_vector(ell: int, n_elements: int) -> np.ndarray:
    return np.exp(1j * ell * 2 * np.pi * np.arange(n_elements) / n_elements) / np.sqrt(n_elements)


def steered_effective_gain(q: np.ndarray, channel: np.ndarray, a: np.ndarray, b: np.ndarray,
                           q_tx: np.ndarray | None = None) -> complex:
    """(q * a) channel (b * conj(q_tx)); q_tx defaults to q (mode-domain use)."""
    q_tx = q if q_tx is None else q_tx
    if channel.shape != (len(q), len(q_tx)) or len(a) != len(q) or len(b) != len(q_tx):
        raise ValueError(
            f"shape mismatch: channel {channel.shape}, rx {len(q)}/{len(a)}, tx {len(q_tx)}/{len(b)}"
        )
    return complex((q * a) @ channel @ (b * q_tx.conj()))


def feasible_region_epsilon(d_max: float, phi: float, psi: float) -> float:
    """Ring half-width unlocked by steering over oblique angles phi + psi."""
    if not 0 <= phi + psi <= math.pi / 2 + 1e-12:
        raise ValueError("phi + psi must lie in [0, pi/2]")
    return d_max * math.sin(phi + psi) / 2


@dataclass(frozen=True)
class ChannelRealization:
    modes: tuple[int, ...]
    cu_radii: np.ndarray
    z_c: float
    waist_radius: float
    gain_matrix: np.ndarray
    mux_matrix: np.ndarray
    eigenvalues: np.ndarray
    effective_gains: np.ndarray
    power_alloc: np.ndarray
    se_per_mode: np.ndarray
    se_total: float
    antenna_channel: np.ndarray
    steering_tx: np.ndarray
    steering_rx: np.ndarray
    steered_gains: np.ndarray
    steered_power_alloc: np.ndarray
    se_steered_total: float


CU_ANGLES = (0.0, math.pi)


def build_realization(cfg: ScenarioConfig, cu_offset: float, z_c: float, waist: float) -> ChannelRealization:
    """Channel for two receivers diametrally placed at ``cu_offset`` from the beam axis."""
    modes = cfg.mode_set
    if len(modes) != 2:
        raise ValueError("multiplexing uses exactly two modes")
    lam = cfg.wavelength
    offsets = np.full(2, cu_offset)
    G = gain_matrix(modes, offsets, z_c, waist, lam)
    Q = mux_matrix(modes, CU_ANGLES)
    g_de = effective_gains(G, Q)
    wf = water_filling(np.abs(g_de) ** 2, cfg.tx_power, cfg.noise_power)
    se_modes, se_total = spectrum_efficiency(wf.powers, np.abs(g_de) ** 2, cfg.noise_power)

    H = antenna_channel(cfg, z_c, cu_offset)
    b, a = steering_vectors(cfg, z_c, cu_offset, 2)
    steered = np.array([
        steered_effective_gain(q, H, a, b, uca_mode_vector(m, cfg.uca_elements))
        for q, m in zip(Q, modes)
    ])
    wf_s = water_filling(np.abs(steered) ** 2, cfg.tx_power, cfg.noise_power)
    _, se_steered = spectrum_efficiency(wf_s.powers, np.abs(steered) ** 2, cfg.noise_power)
    return ChannelRealization(
        modes=modes, cu_radii=offsets, z_c=z_c, waist_radius=waist, gain_matrix=G, mux_matrix=Q,
        eigenvalues=mode_eigenvalues(G), effective_gains=g_de, power_alloc=wf.powers,
        se_per_mode=se_modes, se_total=se_total, antenna_channel=H, steering_tx=b, steering_rx=a,
        steered_gains=steered, steered_power_alloc=wf_s.powers, se_steered_total=se_steered,
    )


def cow_realization(cfg: ScenarioConfig, sel: SelectionResult) -> ChannelRealization:
    """Channel for a selected pair; the waist puts the bright ring on both CUs."""
    if not sel.found:
        raise ValueError("no cooperative pair to build a channel for")
    return build_realization(cfg, sel.chord / 2, sel.z_c, sel.waist_radius)


def fixed_uca_realization(cfg: ScenarioConfig, field: UserField) -> ChannelRealization | None:
    """Baseline: a two-antenna receiver of fixed aperture at the user nearest the BS.

    The BS still picks its best waist: the bright ring lands on the antennas
    when that is reachable, otherwise the narrowest beam at that distance.
    """
    inside = np.flatnonzero(field.r <= cfg.bs_coverage_radius)
    if len(inside) == 0:
        return None
    r0 = float(field.r[inside].min())
    z = math.hypot(r0, cfg.bs_height)
    half = cfg.baseline_separation / 2
    lam, ell = cfg.wavelength, cfg.max_mode
    if half >= feasible_radius(z, lam, ell):
        waist = waist_from_target_radius(half, z, lam, ell)
    else:
        waist = math.sqrt(z * lam / math.pi)
    return build_realization(cfg, half, z, waist)

