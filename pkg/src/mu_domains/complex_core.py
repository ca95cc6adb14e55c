"""Scalar building blocks: linear-fractional maps, the Psi/Upsilon maps of a
tetrablock point, their image discs and sup-norms, and a two-point Pick solver.

Most array helpers here accept numpy arrays as well as scalars so that sweeps
can evaluate many points at once.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import expr as ex
from .errors import (
    DenominatorVanishes,
    NormInfinite,
    OutsideDisc,
    PickInfeasible,
    PoleOnBoundary,
)
from .settings import DEGENERATE_RTOL, DENOM_FLOOR


class Unbounded(enum.Enum):
    """Marker for an infinite sup-norm."""

    INFINITE = "inf"

    def __repr__(self):
        return "INFINITE"


INFINITE = Unbounded.INFINITE


def as_complex(z, name="value"):
    z = complex(z)
    if not cmath.isfinite(z):
        raise ValueError(f"{name} must be finite, got {z}")
    return z


@dataclass(frozen=True)
class LinearFractional:
    """The map ``z -> (alpha z + beta) / (gamma z + delta)``.

    When ``constant`` is set the map is the constant function with that value,
    which is how the degenerate Psi (x1 x2 == x3) is represented.
    """

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    constant: Optional[complex] = None

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, as_complex(getattr(self, name), name))
        if self.constant is not None:
            object.__setattr__(self, "constant", as_complex(self.constant, "constant"))
        elif self.alpha == 0 and self.beta == 0 and self.gamma == 0 and self.delta == 0:
            raise ValueError("linear-fractional map with all coefficients zero")

    @property
    def is_constant(self):
        return self.constant is not None

    def __call__(self, z):
        return eval_lf(self, z)


def eval_lf(f: LinearFractional, z):
    """Evaluate ``f`` at ``z`` (scalar or array).

    Raises DenominatorVanishes if any denominator has modulus at most
    ``DENOM_FLOOR`` and ``f`` is not the constant branch.
    """
    zz = np.asarray(z, dtype=complex)
    if f.is_constant:
        out = np.full(zz.shape, f.constant, dtype=complex)
    else:
        den = f.gamma * zz + f.delta
        if np.any(np.abs(den) <= DENOM_FLOOR):
            raise DenominatorVanishes(f"denominator vanishes for {f}")
        out = (f.alpha * zz + f.beta) / den
    return out.item() if out.ndim == 0 else out


def is_degenerate(x1, x2, x3):
    """True where ``x1 x2 == x3`` within the relative tolerance."""
    return np.abs(x1 * x2 - x3) <= DEGENERATE_RTOL * (1 + np.abs(x3))


def psi(x) -> LinearFractional:
    """Psi(., x): ``z -> (x3 z - x1) / (x2 z - 1)``."""
    x1, x2, x3 = (as_complex(v) for v in x)
    if is_degenerate(x1, x2, x3):
        return LinearFractional(x3, -x1, x2, -1, constant=x1)
    return LinearFractional(x3, -x1, x2, -1)


def upsilon(x) -> LinearFractional:
    """Upsilon(., x) = Psi(., (x2, x1, x3))."""
    x1, x2, x3 = x
    return psi((x2, x1, x3))


@dataclass(frozen=True)
class DiscImage:
    center: complex
    radius: float
    degenerate: bool = False

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("radius must be non-negative")
        if self.degenerate and self.radius != 0:
            raise ValueError("degenerate image must have radius 0")

    @property
    def sup(self):
        """Largest modulus over the disc, i.e. the sup-norm of the generating map."""
        return abs(self.center) + self.radius


def lf_image_disc_arrays(alpha, beta, gamma, delta):
    """Centre and radius of the image of the unit disc under ``(alpha z + beta)/(gamma z + delta)``.

    Valid where ``|gamma| < |delta|`` (pole outside the closed disc); other
    entries get ``nan`` centre and ``inf`` radius.
    """
    alpha, beta, gamma, delta = np.broadcast_arrays(
        *(np.asarray(v, dtype=complex) for v in (alpha, beta, gamma, delta))
    )
    w = np.abs(delta) ** 2 - np.abs(gamma) ** 2
    ok = w > 0
    safe = np.where(ok, w, 1.0)
    center = np.where(ok, (beta * np.conj(delta) - alpha * np.conj(gamma)) / safe, np.nan)
    radius = np.where(ok, np.abs(alpha * delta - beta * gamma) / safe, np.inf)
    return center, radius


def psi_image_disc(x) -> DiscImage:
    x1, x2, x3 = (as_complex(v) for v in x)
    if is_degenerate(x1, x2, x3):
        return DiscImage(x1, 0.0, degenerate=True)
    if abs(x2) >= 1:
        raise NormInfinite(f"Psi(., x) is unbounded on the disc for x = {x}")
    d = 1 - abs(x2) ** 2
    return DiscImage((x1 - x2.conjugate() * x3) / d, abs(x1 * x2 - x3) / d)


def d_norm_arrays(x1, x2, x3):
    """Vectorised D(x); ``np.inf`` where the sup-norm is infinite."""
    x1, x2, x3 = (np.asarray(v, dtype=complex) for v in (x1, x2, x3))
    inside = np.abs(x2) < 1
    denom = np.where(inside, 1 - np.abs(x2) ** 2, 1.0)
    closed = (np.abs(x1 - np.conj(x2) * x3) + np.abs(x1 * x2 - x3)) / denom
    out = np.where(inside, closed, np.where(is_degenerate(x1, x2, x3), np.abs(x1), np.inf))
    return out


def psi_sup_via_image(x1, x2, x3):
    """Sup-norm of Psi(., x) computed as |centre| + radius of its image disc (vectorised)."""
    x1, x2, x3 = (np.asarray(v, dtype=complex) for v in (x1, x2, x3))
    center, radius = lf_image_disc_arrays(x3, -x1, x2, -1.0)
    out = np.abs(center) + radius
    return np.where(is_degenerate(x1, x2, x3), np.abs(x1), out)


def d_norm(x) -> Union[float, Unbounded]:
    """D(x) = sup over the disc of |Psi(z, x)|, or ``INFINITE``."""
    x1, x2, x3 = (as_complex(v) for v in x)
    v = float(d_norm_arrays(x1, x2, x3))
    return INFINITE if math.isinf(v) else v


def unit_circle(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def sup_norm_grid(f: LinearFractional, n: int = 4096) -> float:
    """Max of |f| over ``n`` equispaced points of the unit circle."""
    if n < 16:
        raise ValueError("grid size must be at least 16")
    z = unit_circle(n)
    if not f.is_constant and np.any(np.abs(f.gamma * z + f.delta) <= DENOM_FLOOR):
        raise PoleOnBoundary(f"{f} has a pole on the unit circle")
    return float(np.max(np.abs(np.atleast_1d(eval_lf(f, z)))))


def pseudohyperbolic(z, w) -> float:
    z, w = as_complex(z), as_complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise OutsideDisc(f"points must lie in the open unit disc: {z}, {w}")
    return abs((z - w) / (1 - w.conjugate() * z))


def mobius_point(a, z):
    """The disc automorphism ``z -> (z - a)/(1 - conj(a) z)`` (sends a to 0)."""
    return (z - a) / (1 - np.conj(a) * z)


@dataclass(frozen=True)
class SchurFunction:
    """An analytic self-map of the closed disc held as an expression tree."""

    expr: ex.Expr

    def __call__(self, lam):
        out = self.expr(lam)
        return out.item() if np.ndim(out) == 0 else out

    def boundary_sup(self, n=4096):
        return float(np.max(np.abs(self.expr(unit_circle(n)))))

    def to_json(self):
        return self.expr.to_json()


def solve_two_point_pick(z1, w1, z2, w2, tol=1e-9) -> SchurFunction:
    """A Schur function h with h(z1) = w1 and h(z2) = w2.

    Returns ``m_{-w1}(c * m_{z1}(z))`` with ``c = m_{w1}(w2) / m_{z1}(z2)``,
    where ``m_a`` is the automorphism sending ``a`` to 0. This is the
    solution whose Schur parameter after two steps is the constant ``c``.
    """
    z1, w1, z2, w2 = (as_complex(v) for v in (z1, w1, z2, w2))
    for v in (z1, w1, z2, w2):
        if abs(v) >= 1:
            raise OutsideDisc(f"interpolation data must lie in the open disc, got {v}")
    if z1 == z2:
        raise ValueError("interpolation nodes must be distinct")
    u = mobius_point(z1, z2)
    v = mobius_point(w1, w2)
    if abs(v) > abs(u) + tol:
        raise PickInfeasible(
            f"pseudohyperbolic distance of targets {abs(v):.17g} exceeds that of nodes {abs(u):.17g}"
        )
    c = v / u
    if abs(c) > 1:
        c /= abs(c)
    inner = ex.mul(ex.const(c), ex.mobius(z1, ex.LAMBDA))
    return SchurFunction(ex.mobius(-w1, inner))
