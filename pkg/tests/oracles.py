"""Independent reference computations used to check the library.

Nothing here calls the closed forms under test; each oracle takes a
different route (symbolic expansion, quadrature, direct search, sampling,
brute-force enumeration).
"""

import math

import numpy as np
import sympy as sp
from scipy.integrate import quad

_x = sp.Symbol("x")


def laguerre_symbolic(p, alpha, x):
    return float(sp.assoc_laguerre(p, alpha, _x).expand().subs(_x, sp.Rational(str(x))))


def intensity_direct(ell, w, r):
    """Eq. for the p = 0 intensity written out with w = w(z) given."""
    a = abs(ell)
    return 2 / (math.pi * w**2 * math.factorial(a)) * (math.sqrt(2) * r / w) ** (2 * a) * math.exp(-2 * r**2 / w**2)


def transverse_power(f):
    """Integral of f(r) over the plane in polar coordinates."""
    val, _ = quad(lambda r: f(r) * 2 * math.pi * r, 0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def golden_section_max(f, lo, hi, tol=1e-12):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(1.0, abs(b)):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def d_min_fixed_point(H, r_s, lam, ell, iters=3000):
    """Solve D = 2 sqrt(lam |l| z / pi), z = sqrt(H^2 + r^2 - D^2/4), by fixed-point iteration.

    With c = lam |l| / pi and S = H^2 + r^2 the condition reads z^2 + c z = S.
    The direct map D <- 2 sqrt(c z(D)) contracts with factor c / 2z, so it is
    used where c <= sqrt(S); elsewhere z <- S / (z + c), which always contracts.
    """
    H, r_s, lam, ell = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (H, r_s, lam, ell)))
    c = lam * np.abs(ell) / np.pi
    S = H**2 + r_s**2
    direct = c <= np.sqrt(S)
    d = np.zeros(H.shape)
    z = np.sqrt(S)
    for _ in range(iters):
        d = np.where(direct, 2 * np.sqrt(c * np.sqrt(np.maximum(S - d**2 / 4, 0.0))), d)
        z = np.where(direct, z, S / (z + c))
    return np.where(direct, d, 2 * np.sqrt(c * z))


def pair_feasible(chord, r_mid, H, lam, ell, d_max):
    """Window check straight from the waist-existence condition."""
    z = np.sqrt(np.maximum(r_mid**2 - chord**2 / 4 + H**2, 0.0))
    return (chord <= d_max) & (chord >= 2 * np.sqrt(z * lam * abs(ell) / np.pi))


def ring_angle_mc(r_s, H, lam, ell, d_max, n, rng):
    """Fraction of uniform angle pairs on the ring whose chord is usable."""
    t1 = rng.uniform(0, 2 * np.pi, n)
    t2 = rng.uniform(0, 2 * np.pi, n)
    chord = 2 * r_s * np.abs(np.sin((t1 - t2) / 2))
    return pair_feasible(chord, r_s, H, lam, ell, d_max).mean()


def brute_force_selection(field, cfg):
    """Replays the ring search by enumerating every same-ring pair.

    Chords come from the law of cosines and feasibility from
    :func:`pair_feasible`. Returns (eps at termination, best chord, best pair)
    or (None, None, None).
    """
    eps = cfg.ring_half_width
    R = cfg.bs_coverage_radius
    r, th = field.r, field.theta
    while eps <= R:
        best = None
        r_s = eps
        while r_s <= R - eps + 1e-9 * R:
            members = np.flatnonzero((r >= r_s - eps) & (r <= r_s + eps))
            if len(members) >= 2:
                i, j = np.triu_indices(len(members), 1)
                a, b = members[i], members[j]
                chord = np.sqrt(np.maximum(r[a] ** 2 + r[b] ** 2 - 2 * r[a] * r[b] * np.cos(th[a] - th[b]), 0.0))
                ok = pair_feasible(chord, (r[a] + r[b]) / 2, cfg.bs_height, cfg.wavelength, cfg.max_mode, cfg.d2d_max)
                if ok.any():
                    k = np.flatnonzero(ok)[np.argmin(chord[ok])]
                    if best is None or chord[k] < best[0]:
                        best = (float(chord[k]), (int(a[k]), int(b[k])))
            r_s += 2 * eps
        if best is not None:
            return eps, best[0], best[1]
        eps *= 2
    return None, None, None


def two_user_success_mc(R, ring_outer, H, lam, ell, d_max, n, rng):
    """Probability that two uniform disk users form a feasible pair inside one ring."""
    r1 = R * np.sqrt(rng.random(n))
    r2 = R * np.sqrt(rng.random(n))
    dt = 2 * np.pi * rng.random(n)
    chord = np.sqrt(np.maximum(r1**2 + r2**2 - 2 * r1 * r2 * np.cos(dt), 0.0))
    inside = (r1 <= ring_outer) & (r2 <= ring_outer)
    return (inside & pair_feasible(chord, (r1 + r2) / 2, H, lam, ell, d_max)).mean()


def best_split_grid(g1, g2, total, sigma2, n=1000):
    """Largest two-channel sum rate over an n-point grid of power splits."""
    p1 = np.linspace(0, total, n)
    rate = np.log2(1 + p1 * g1 / sigma2) + np.log2(1 + (total - p1) * g2 / sigma2)
    return rate.max()
