"""
Gagliardo-Nirenberg type interpolation ratio for capillary densities.

For rho >= 0 on a box in d dimensions,

    ratio = ||rho^((2+alpha)/2)||_2 / (||rho||_1^a ||grad beta(rho)||_2^b),
    beta(rho) = 2/(2+alpha) rho^((2+alpha)/2),

with (a, b) fixed by d and alpha.  The ratio is bounded over all admissible
densities; here it is sampled on random compactly supported bumps.
"""

import numpy as np


class GNError(ValueError):
    """Undefined ratio (zero density or unsupported dimension)."""


def gn_exponents(d, alpha):
    """Exponents (a, b) for dimension d and capillarity exponent alpha."""
    if d == 1:
        return (2 + alpha) / (3 + alpha), (1 + alpha) / (3 + alpha)
    if d == 2:
        return 0.5, (1 + alpha) / (2 + alpha)
    if d >= 3:
        q = d * (1 + alpha) + 2
        return (2 + alpha) / q, d * (1 + alpha) / q
    raise GNError(f"unsupported dimension {d}")


def scaling_defect(d, alpha, a, b):
    """Residuals of the amplitude and dilation balance under rho -> lam rho(kappa x).

    Both vanish exactly when the ratio is invariant under the rescaling.
    """
    h = (2 + alpha) / 2
    amplitude = h - a - b * h
    dilation = -d / 2 + d * a - b * (1 - d / 2)
    return amplitude, dilation


def gn_ratio(rho, spacing, alpha, d=None):
    """Ratio on a uniform box grid with the given cell spacing.

    ``rho`` is a d-dimensional array, assumed to vanish near the box edge.
    Integrals use the midpoint rule, gradients centered differences of beta.
    """
    rho = np.asarray(rho, dtype=float)
    d = rho.ndim if d is None else d
    if np.any(rho < 0):
        raise GNError("density must be nonnegative")
    vol = spacing**d
    h = (2 + alpha) / 2
    # ||rho^h||_2 is computed from rho^(2h) so that alpha = -1 reuses int rho
    num = (np.sum(rho ** (2 * h)) * vol) ** 0.5
    l1 = np.sum(rho) * vol
    if l1 == 0:
        raise GNError("ratio undefined for the zero field")
    a, b = gn_exponents(d, alpha)
    if b == 0:
        return float(num / l1**a)
    beta = rho**h / h
    grads = np.gradient(beta, spacing) if d > 1 else [np.gradient(beta, spacing)]
    gnorm = (sum(np.sum(g * g) for g in grads) * vol) ** 0.5
    return float(num / (l1**a * gnorm**b))


def random_bumps(rng, count=3):
    """Parameters of a random sum of compact bumps inside the unit box."""
    radius = rng.uniform(0.08, 0.3, size=count)
    centers = rng.uniform(0, 1, size=(count, 3))
    centers = radius[:, None] + centers * (1 - 2 * radius[:, None])
    amps = np.exp(rng.normal(0.0, 1.0, size=count))
    return radius, centers, amps


def bump_field(params, n, d):
    """Sample sum_i A_i (1 - |x - c_i|^2 / r_i^2)_+^4 at cell centers of an n^d grid."""
    radius, centers, amps = params
    x = (np.arange(n) + 0.5) / n
    axes = np.meshgrid(*([x] * d), indexing="ij")
    rho = np.zeros((n,) * d)
    for r, c, A in zip(radius, centers, amps):
        q = sum((ax - c[k]) ** 2 for k, ax in enumerate(axes)) / r**2
        rho += A * np.clip(1 - q, 0, None) ** 4
    return rho


DEFAULT_CELLS = {1: 256, 2: 64, 3: 40}


def sweep(d, alpha, draws, seed=0, n=None):
    """Max ratio over ``draws`` random fields at n and 2n cells per side.

    The same draws are used at both resolutions.  Returns a dict with both
    maxima and their relative change.
    """
    n = DEFAULT_CELLS[d] if n is None else n
    rng = np.random.default_rng(seed)
    coarse, fine = [], []
    for _ in range(draws):
        p = random_bumps(rng, count=int(rng.integers(1, 4)))
        coarse.append(gn_ratio(bump_field(p, n, d), 1.0 / n, alpha, d))
        fine.append(gn_ratio(bump_field(p, 2 * n, d), 0.5 / n, alpha, d))
    a, b = gn_exponents(d, alpha)
    mc, mf = max(coarse), max(fine)
    return {"d": d, "alpha": alpha, "a": a, "b": b, "draws": draws, "n": n,
            "max_ratio": mf, "max_ratio_coarse": mc,
            "refinement_change": abs(mf - mc) / mf, "finite": bool(np.isfinite(mf))}
