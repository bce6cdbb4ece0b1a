"""
Thermodynamic and capillarity state maps for the power-law Euler-Korteweg model.

Pressure p(rho) = rho**gamma, capillarity k(rho) = c_alpha * rho**alpha.  The
auxiliary maps beta, K, mu and theta are the antiderivatives

    beta' = sqrt(k),  K' = rho k,  mu' = sqrt(rho k),  theta' = sqrt(k / rho)

with beta(0) = K(0) = mu(0) = 0 and theta(0) = 0 when alpha > -1 (theta is
logarithmic for alpha = -1).  All maps accept scalars or numpy arrays.
"""

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """A state map was evaluated outside its domain."""


def _check_nonneg(rho, name="rho"):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError(f"{name} must be >= 0")
    return rho


def _check_pos(rho, name="rho"):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError(f"{name} must be > 0")
    return rho


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class StateFunctions:
    """Parameter pack (gamma, alpha, c_alpha, epsilon) and derived state maps."""

    gamma: float = 2.0
    alpha: float = -1.0
    c_alpha: float = 0.25
    epsilon: float = 0.1

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if not self.c_alpha > 0:
            raise ValueError(f"c_alpha must be > 0, got {self.c_alpha}")
        if not self.alpha >= -1:
            raise ValueError(f"alpha must be >= -1, got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")

    @classmethod
    def qhd(cls, epsilon=0.1, gamma=2.0):
        """Quantum hydrodynamics: k(rho) = 1 / (4 rho)."""
        return cls(gamma=gamma, alpha=-1.0, c_alpha=0.25, epsilon=epsilon)

    def with_epsilon(self, epsilon):
        return StateFunctions(self.gamma, self.alpha, self.c_alpha, epsilon)

    @property
    def omega(self):
        # |rho k'(rho)| = |alpha| k(rho) exactly for the power law
        return abs(self.alpha)

    # -- pressure and internal energy ---------------------------------------

    def pressure(self, rho):
        rho = _check_nonneg(rho)
        return _out(rho**self.gamma)

    def dpressure(self, rho):
        rho = _check_nonneg(rho)
        return _out(self.gamma * rho ** (self.gamma - 1))

    def internal_energy(self, rho):
        """f(rho) = rho**gamma / (gamma - 1)."""
        rho = _check_nonneg(rho)
        return _out(rho**self.gamma / (self.gamma - 1))

    def enthalpy(self, rho):
        """f'(rho) = gamma / (gamma - 1) * rho**(gamma - 1)."""
        rho = _check_nonneg(rho)
        g = self.gamma
        return _out(g / (g - 1) * rho ** (g - 1))

    def d2_internal_energy(self, rho):
        """f''(rho) = gamma * rho**(gamma - 2); requires rho > 0 when gamma < 2."""
        rho = _check_pos(rho) if self.gamma < 2 else _check_nonneg(rho)
        return _out(self.gamma * rho ** (self.gamma - 2))

    def relative_internal_energy(self, rho, r):
        """f(rho | r) = f(rho) - f'(r) (rho - r) - f(r)."""
        rho = _check_nonneg(rho)
        r = _check_pos(r, "r")
        g = self.gamma
        val = rho**g / (g - 1) - g / (g - 1) * r ** (g - 1) * (rho - r) - r**g / (g - 1)
        return _out(val)

    # -- capillarity ---------------------------------------------------------

    def _check_cap(self, rho):
        if self.alpha < 0:
            rho = np.asarray(rho, dtype=float)
            if np.any(rho <= 0):
                raise DomainError("k(rho) is singular at rho = 0 for alpha < 0")
            return rho
        return _check_nonneg(rho)

    def capillarity_k(self, rho):
        rho = self._check_cap(rho)
        return _out(self.c_alpha * rho**self.alpha)

    def capillarity_dk(self, rho):
        rho = self._check_cap(rho)
        a = self.alpha
        if a == 0:
            return _out(np.zeros_like(rho))
        return _out(a * self.c_alpha * rho ** (a - 1))

    def beta(self, rho):
        rho = _check_nonneg(rho)
        a = self.alpha
        return _out(2 * np.sqrt(self.c_alpha) / (2 + a) * rho ** ((2 + a) / 2))

    def dbeta(self, rho):
        rho = self._check_cap(rho)
        return _out(np.sqrt(self.c_alpha) * rho ** (self.alpha / 2))

    def K(self, rho):
        rho = _check_nonneg(rho)
        a = self.alpha
        return _out(self.c_alpha / (2 + a) * rho ** (2 + a))

    def dK(self, rho):
        rho = _check_nonneg(rho)
        return _out(self.c_alpha * rho ** (1 + self.alpha))

    def d2K(self, rho):
        """K''(rho) = (1 + alpha) c_alpha rho**alpha; identically 0 for QHD."""
        a = self.alpha
        if a == -1:
            return _out(np.zeros_like(np.asarray(rho, dtype=float)))
        rho = self._check_cap(rho)
        return _out((1 + a) * self.c_alpha * rho**a)

    def mu(self, rho):
        rho = _check_nonneg(rho)
        a = self.alpha
        return _out(2 * np.sqrt(self.c_alpha) / (3 + a) * rho ** ((3 + a) / 2))

    def dmu(self, rho):
        rho = _check_nonneg(rho)
        return _out(np.sqrt(self.c_alpha) * rho ** ((1 + self.alpha) / 2))

    def d2mu(self, rho):
        a = self.alpha
        if a == -1:
            return _out(np.zeros_like(np.asarray(rho, dtype=float)))
        rho = _check_pos(rho) if a < 1 else _check_nonneg(rho)
        return _out(np.sqrt(self.c_alpha) * (1 + a) / 2 * rho ** ((a - 1) / 2))

    def theta(self, rho):
        a = self.alpha
        if a == -1:
            rho = np.asarray(rho, dtype=float)
            if np.any(rho <= 0):
                raise DomainError("theta(rho) = sqrt(c) log(rho) is singular at rho = 0")
            return _out(np.sqrt(self.c_alpha) * np.log(rho))
        rho = _check_nonneg(rho)
        return _out(2 * np.sqrt(self.c_alpha) / (1 + a) * rho ** ((1 + a) / 2))

    def dtheta(self, rho):
        rho = _check_pos(rho) if self.alpha < 1 else _check_nonneg(rho)
        return _out(np.sqrt(self.c_alpha) * rho ** ((self.alpha - 1) / 2))

    def aux_velocity(self, rho, grad_rho):
        """v = sqrt(k(rho) / rho) grad(rho)."""
        rho = _check_pos(rho)
        return _out(np.sqrt(self.capillarity_k(rho) / rho) * np.asarray(grad_rho, dtype=float))

    # -- stiffness -----------------------------------------------------------

    def sound_speed(self, rho):
        rho = _check_nonneg(rho)
        return _out(np.sqrt(self.gamma * rho ** (self.gamma - 1)))
