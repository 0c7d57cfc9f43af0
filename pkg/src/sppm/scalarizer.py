"""Scalarized, proximally regularized objective for one outer iteration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .problem import Problem, as_point

#: Upper bound on the proximal parameter used when none is given.
ALPHA_BAR = 1e6
_NORM_TOL = 1e-12


def uniform_weights(m: int) -> np.ndarray:
    """``(1/sqrt(m), ..., 1/sqrt(m))``."""
    return np.full(m, 1.0 / np.sqrt(m))


@dataclass(frozen=True)
class ScalarizationParams:
    """Weights ``z``, regularization direction ``e`` and proximal parameter ``alpha``.

    ``z`` must be nonnegative and nonzero, ``e`` strictly positive, both of
    unit Euclidean norm, and ``0 < alpha < alpha_bar``.  Pass
    ``normalized=False`` to skip the two unit-norm checks (positivity is
    still enforced); this exists for scaling experiments only.
    """

    z: tuple[float, ...]
    e: tuple[float, ...]
    alpha: float = 1.0
    alpha_bar: float = ALPHA_BAR
    normalized: bool = True

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        e = np.asarray(self.e, dtype=float)
        object.__setattr__(self, "z", tuple(float(v) for v in z))
        object.__setattr__(self, "e", tuple(float(v) for v in e))
        object.__setattr__(self, "alpha", float(self.alpha))
        if z.ndim != 1 or z.size == 0 or z.shape != e.shape:
            raise ParameterError(f"z and e must be vectors of equal length, got {z.shape} and {e.shape}")
        if not np.all(np.isfinite(z)) or np.any(z < 0) or not np.any(z > 0):
            raise ParameterError("weights z must be nonnegative and not all zero")
        if not np.all(np.isfinite(e)) or not np.all(e > 0):
            raise ParameterError("direction e must be strictly positive")
        if self.normalized:
            if abs(np.linalg.norm(z) - 1.0) > _NORM_TOL:
                raise ParameterError(f"weights z must have unit norm, got {np.linalg.norm(z)!r}")
            if abs(np.linalg.norm(e) - 1.0) > _NORM_TOL:
                raise ParameterError(f"direction e must have unit norm, got {np.linalg.norm(e)!r}")
        if not 0.0 < self.alpha < self.alpha_bar:
            raise ParameterError(
                f"proximal parameter must satisfy 0 < α_k < ᾱ (ᾱ = {self.alpha_bar:g}), got alpha={self.alpha!r}"
            )

    @classmethod
    def default(cls, m: int, alpha: float = 1.0, z=None) -> "ScalarizationParams":
        """Uniform ``e``; ``z`` uniform unless given (then normalized)."""
        if z is None:
            zz = uniform_weights(m)
        else:
            zz = np.asarray(z, dtype=float)
            nrm = np.linalg.norm(zz)
            if not nrm > 0:
                raise ParameterError("weights z must be nonnegative and not all zero")
            zz = zz / nrm
        return cls(z=tuple(zz), e=tuple(uniform_weights(m)), alpha=alpha)

    @property
    def m(self) -> int:
        return len(self.z)


def beta(params: ScalarizationParams) -> float:
    """Effective proximal weight ``alpha * <e, z>`` (always positive)."""
    return params.alpha * float(np.dot(params.e, params.z))


@dataclass(frozen=True)
class RegularizedObjective:
    """``phi(x) = <F(x), z> + (beta / 2) ||x - center||^2``.

    ``level_problem`` defines the level set ``{x : G(x) ⪯ G(center)}`` the
    iterate must stay in; it defaults to ``base``.  Passing the untransformed
    problem when ``base`` is ``exp(F)`` gives the same set with better
    conditioned comparisons.
    """

    base: Problem
    params: ScalarizationParams
    center: np.ndarray
    level_problem: Problem | None = None

    def __post_init__(self):
        if self.params.m != self.base.m:
            raise ParameterError(f"weights have length {self.params.m}, problem has m={self.base.m}")
        object.__setattr__(self, "center", as_point(self.center, self.base.n).copy())
        if self.level_problem is None:
            object.__setattr__(self, "level_problem", self.base)
        self.center.setflags(write=False)

    @property
    def beta(self) -> float:
        return beta(self.params)

    @property
    def z(self) -> np.ndarray:
        return np.asarray(self.params.z)

    def value(self, x) -> float:
        return phi_value(self, x)

    def subgradient(self, x) -> np.ndarray:
        return phi_subgradient(self, x)


def phi_value(reg: RegularizedObjective, x) -> float:
    x = as_point(x, reg.base.n)
    diff = x - reg.center
    return float(reg.base.evaluate(x) @ reg.z) + 0.5 * reg.beta * float(diff @ diff)


def phi_subgradient(reg: RegularizedObjective, x) -> np.ndarray:
    """``sum_i z_i g_i(x) + beta (x - center)`` with ``g_i`` the component selections."""
    x = as_point(x, reg.base.n)
    g = reg.beta * (x - reg.center)
    for i, zi in enumerate(reg.params.z):
        if zi != 0.0:
            g = g + zi * reg.base.subgradient(i, x)
    return g
