"""Membership in the tetrablock E, its closure, the symmetrized bidisc G2 and Gamma2.

Every characterisation is expressed as a signed *margin*: the right-hand side
minus the left-hand side of the governing inequality (the minimum of the
slacks when a criterion has several clauses). A positive margin means strict
membership, zero means the boundary, negative means outside the closure. The
``*_margins`` functions are vectorised so that sweeps can classify 10^5
points in one call.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .complex_core import as_complex, d_norm_arrays, is_degenerate, unit_circle
from .errors import OnTorusX3
from .settings import resolve_band


class TetraPoint(NamedTuple):
    x1: complex
    x2: complex
    x3: complex

    @classmethod
    def of(cls, x1, x2, x3):
        return cls(as_complex(x1, "x1"), as_complex(x2, "x2"), as_complex(x3, "x3"))

    def swap(self):
        return TetraPoint(self.x2, self.x1, self.x3)


class SymPoint(NamedTuple):
    s: complex
    p: complex

    @classmethod
    def of(cls, s, p):
        return cls(as_complex(s, "s"), as_complex(p, "p"))


class BetaPair(NamedTuple):
    beta1: complex
    beta2: complex

    @property
    def weight(self):
        return abs(self.beta1) + abs(self.beta2)


@dataclass(frozen=True)
class Matrix2:
    a11: complex
    a12: complex
    a21: complex
    a22: complex
    exceeds_ball: bool = False

    def as_array(self):
        return np.array([[self.a11, self.a12], [self.a21, self.a22]], dtype=complex)

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def norm(self):
        return float(np.linalg.norm(self.as_array(), 2))

    def point(self):
        return TetraPoint(self.a11, self.a22, self.det)


class Verdict(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


def classify(margin, band=None) -> Verdict:
    band = resolve_band(band)
    if margin > band:
        return Verdict.INTERIOR
    if margin < -band:
        return Verdict.EXTERIOR
    return Verdict.BOUNDARY


def classify_array(margins, band):
    """+1 interior, 0 boundary, -1 exterior, elementwise."""
    m = np.asarray(margins, dtype=float)
    return np.where(m > band, 1, np.where(m < -band, -1, 0))


@dataclass(frozen=True)
class CriterionResult:
    id: str
    verdict: Verdict
    margin: float


@dataclass
class MembershipVerdict:
    overall: Verdict
    margin: float
    criteria: list
    beta: Optional[BetaPair] = None
    matrix: Optional[Matrix2] = None
    consistent: bool = True
    notes: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# tetrablock criteria


def _abs2(z):
    return np.abs(z) ** 2


def _margin_psi_norm(x1, x2, x3):
    # ||Psi(., x)|| < 1, plus |x2| < 1 when Psi is degenerate (x1 x2 = x3)
    d = d_norm_arrays(x1, x2, x3)
    m = 1 - d
    degenerate_outside = is_degenerate(x1, x2, x3) & (np.abs(x2) >= 1)
    m = np.where(degenerate_outside, np.minimum(1 - np.abs(x1), 1 - np.abs(x2)), m)
    return np.where(np.isfinite(m), m, -np.inf)


def _margin_part3(x1, x2, x3):
    return (1 - _abs2(x2)) - (np.abs(x1 - np.conj(x2) * x3) + np.abs(x1 * x2 - x3))


def _margin_part4(x1, x2, x3):
    lhs = _abs2(x1) - _abs2(x2) + _abs2(x3) + 2 * np.abs(x2 - np.conj(x1) * x3)
    return np.minimum(1 - lhs, 1 - np.abs(x2))


def _margin_part5(x1, x2, x3):
    lhs = _abs2(x1) + _abs2(x2) - _abs2(x3) + 2 * np.abs(x1 * x2 - x3)
    return np.minimum(1 - lhs, 1 - np.abs(x3))


def _margin_part6(x1, x2, x3):
    # on the torus |x3| = 1 the inequality only forces x1 = conj(x2) x3, so the
    # bound |x1| <= 1 (hence |x2| <= 1) has to be imposed separately
    m = (1 - _abs2(x3)) - (np.abs(x1 - np.conj(x2) * x3) + np.abs(x2 - np.conj(x1) * x3))
    return np.minimum(m, 1 - np.abs(x1))


def spectral_norm_2x2(m11, m12, m21, m22):
    """Largest singular value of [[m11, m12], [m21, m22]], elementwise.

    Uses sigma_max^2 = (F + sqrt(F^2 - 4 |det|^2)) / 2 with F the squared
    Frobenius norm, writing the discriminant as (h11 - h22)^2 + 4 |h12|^2
    for H = M M^* so that it stays accurate when the singular values are close.
    """
    h11 = _abs2(m11) + _abs2(m12)
    h22 = _abs2(m21) + _abs2(m22)
    h12 = m11 * np.conj(m21) + m12 * np.conj(m22)
    gap = np.hypot(h11 - h22, 2 * np.abs(h12))
    return np.sqrt((h11 + h22 + gap) / 2)


def min_completion_norm(x1, x2, x3):
    """Smallest operator norm of a 2x2 matrix with diagonal (x1, x2) and determinant x3.

    With the determinant fixed, the largest singular value grows with the
    Frobenius norm, which is smallest when |a12| = |a21| = sqrt|x1 x2 - x3|;
    the symmetric choice a12 = a21 attains it.
    """
    off = np.sqrt(np.asarray(x1 * x2 - x3, dtype=complex))
    return spectral_norm_2x2(x1, off, off, x2)


def _margin_part7(x1, x2, x3):
    return 1 - min_completion_norm(x1, x2, x3)


def symmetric_completion_arrays(x1, x2, x3):
    x1, x2, x3 = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (x1, x2, x3)))
    off = np.sqrt(x1 * x2 - x3)
    return np.stack([np.stack([x1, off], -1), np.stack([off, x2], -1)], -2)


def _margin_part8(x1, x2, x3):
    a = symmetric_completion_arrays(x1, x2, x3)
    return 1 - np.linalg.norm(a, ord=2, axis=(-2, -1))


def beta_arrays(x1, x2, x3):
    """Canonical solution of x1 = b1 + conj(b2) x3, x2 = b2 + conj(b1) x3 (needs |x3| != 1)."""
    d = 1 - _abs2(x3)
    safe = np.where(d == 0, 1.0, d)
    return (x1 - np.conj(x2) * x3) / safe, (x2 - np.conj(x1) * x3) / safe


def _margin_part9(x1, x2, x3):
    inside = np.abs(x3) < 1
    b1, b2 = beta_arrays(x1, x2, np.where(inside, x3, 0))
    m = np.minimum(1 - np.abs(x3), 1 - np.abs(b1) - np.abs(b2))
    # |x3| = 1: solvable iff x2 = conj(x1) x3, and then |b1| + |b2| >= |x1|
    torus = np.minimum(1 - np.abs(x3), np.minimum(1 - np.abs(x1), -np.abs(x2 - np.conj(x1) * x3)))
    return np.where(inside, m, torus)


def _swapped(fn):
    return lambda x1, x2, x3: fn(x2, x1, x3)


TETRA_CRITERIA = {
    "2": _margin_psi_norm,
    "2'": _swapped(_margin_psi_norm),
    "3": _margin_part3,
    "3'": _swapped(_margin_part3),
    "4": _margin_part4,
    "4'": _swapped(_margin_part4),
    "5": _margin_part5,
    "6": _margin_part6,
    "7": _margin_part7,
    "8": _margin_part8,
    "9": _margin_part9,
}

#: Criterion whose verdict is reported as the overall verdict. It is a
#: division-free polynomial inequality, so it is the best conditioned.
REFERENCE_CRITERION = "6"


def tetra_margins(x1, x2, x3, criteria=None):
    """Signed margins of the selected criteria, as a dict of arrays."""
    ids = list(TETRA_CRITERIA) if criteria is None else list(criteria)
    x1, x2, x3 = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (x1, x2, x3)))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return {cid: np.asarray(TETRA_CRITERIA[cid](x1, x2, x3), dtype=float) for cid in ids}


def closure_margin(x1, x2, x3):
    """Margin of the reference criterion; >= 0 exactly on the closure of E."""
    with np.errstate(invalid="ignore", over="ignore"):
        return _margin_part6(*(np.asarray(v, dtype=complex) for v in (x1, x2, x3)))


def genuine_conflict(margins: dict, band):
    """True where two criteria are on opposite sides of the boundary, both beyond the band."""
    stacked = np.stack(list(margins.values()))
    return (stacked.max(axis=0) > band) & (stacked.min(axis=0) < -band)


def tetra_membership(x, criteria=None, band=None) -> MembershipVerdict:
    band = resolve_band(band)
    x = TetraPoint.of(*x)
    ids = list(TETRA_CRITERIA) if criteria is None else list(criteria)
    margins = tetra_margins(*x, criteria=ids)
    results = [CriterionResult(cid, classify(float(m), band), float(m)) for cid, m in margins.items()]
    ref = float(closure_margin(*x))
    verdict = MembershipVerdict(
        overall=classify(ref, band),
        margin=ref,
        criteria=results,
        consistent=not bool(genuine_conflict(margins, band)),
    )
    if not verdict.consistent:
        verdict.notes.append("criteria disagree beyond the boundary band")
    if verdict.overall is not Verdict.EXTERIOR:
        if abs(x.x3) < 1 - band:
            verdict.beta = beta_decompose(x, tol=band)
        verdict.matrix = matrix_completion(x, symmetric=True)
    return verdict


def beta_decompose(x, tol=None) -> BetaPair:
    tol = resolve_band(tol)
    x1, x2, x3 = TetraPoint.of(*x)
    if abs(x3) >= 1 - tol:
        raise OnTorusX3(f"|x3| = {abs(x3):.17g} is on or beyond the unit circle")
    b1, b2 = beta_arrays(x1, x2, x3)
    return BetaPair(complex(b1), complex(b2))


def matrix_completion(x, symmetric=True, tol=1e-9) -> Matrix2:
    """A 2x2 matrix A with (a11, a22, det A) = x.

    The symmetric mode uses the principal square root of x1 x2 - x3 for both
    off-diagonal entries. The non-symmetric mode sets a12 = t, a21 = q / t and
    minimises the norm over t > 0 by golden-section search in log t. Either
    way ``exceeds_ball`` flags a result with norm above 1 + tol.
    """
    x1, x2, x3 = TetraPoint.of(*x)
    q = x1 * x2 - x3
    if symmetric or q == 0:
        off = complex(np.sqrt(q))
        a12, a21 = off, off
    else:
        def norm_at(log_t):
            t = np.exp(log_t)
            return np.linalg.norm(np.array([[x1, t], [q / t, x2]]), 2)

        centre = 0.5 * np.log(abs(q))
        try:
            res = minimize_scalar(norm_at, bracket=(centre - 4, centre, centre + 4), method="golden")
            t = float(np.exp(res.x))
        except ValueError:
            # flat in t (|q| negligible against the diagonal): balanced moduli are optimal
            t = float(np.exp(centre))
        a12, a21 = complex(t), q / t
    m = Matrix2(x1, a12, a21, x2)
    if m.norm > 1 + tol:
        m = Matrix2(x1, a12, a21, x2, exceeds_ball=True)
    return m


# ---------------------------------------------------------------------------
# symmetrized bidisc


def g2_beta(s, p):
    """Canonical beta with s = beta + conj(beta) p (vectorised; nan where |p| = 1)."""
    s, p = np.asarray(s, dtype=complex), np.asarray(p, dtype=complex)
    d = 1 - _abs2(p)
    safe = np.where(d == 0, 1.0, d)
    return np.where(d == 0, np.nan, (s - np.conj(s) * p) / safe)


def _g2_margin_beta(s, p):
    inside = np.abs(p) < 1
    beta = g2_beta(s, np.where(inside, p, 0))
    # |p| = 1: solvable iff s = conj(s) p, with |s| <= 2 |beta|
    torus = np.minimum(1 - np.abs(p), np.minimum(1 - np.abs(s) / 2, -np.abs(s - np.conj(s) * p)))
    return np.where(inside, np.minimum(1 - np.abs(p), 1 - np.abs(beta)), torus)


def _g2_margin_poly(s, p):
    # |s - conj(s) p| <= 1 - |p|^2 with |s| <= 2; division-free, so well
    # conditioned up to the torus |p| = 1 where beta is 0/0
    m = (1 - _abs2(p)) - np.abs(s - np.conj(s) * p)
    return np.minimum(m, 1 - np.abs(s) / 2)


def _g2_margin_roots(s, p):
    root = np.sqrt(s * s - 4 * p)
    z1, z2 = (s + root) / 2, (s - root) / 2
    return 1 - np.maximum(np.abs(z1), np.abs(z2))


G2_CRITERIA = {"beta": _g2_margin_beta, "roots": _g2_margin_roots, "poly": _g2_margin_poly}

#: Criterion whose verdict is reported as the overall G2 verdict.
G2_REFERENCE_CRITERION = "poly"


def g2_margins(s, p, criteria=None):
    ids = list(G2_CRITERIA) if criteria is None else list(criteria)
    s, p = np.broadcast_arrays(np.asarray(s, dtype=complex), np.asarray(p, dtype=complex))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return {cid: np.asarray(G2_CRITERIA[cid](s, p), dtype=float) for cid in ids}


def g2_closure_margin(s, p):
    """Margin of the reference G2 criterion; >= 0 exactly on Gamma2."""
    with np.errstate(invalid="ignore", over="ignore"):
        return _g2_margin_poly(np.asarray(s, dtype=complex), np.asarray(p, dtype=complex))


def g2_membership(y, band=None) -> MembershipVerdict:
    band = resolve_band(band)
    y = SymPoint.of(*y)
    margins = g2_margins(*y)
    results = [CriterionResult(cid, classify(float(m), band), float(m)) for cid, m in margins.items()]
    ref = float(margins[G2_REFERENCE_CRITERION])
    verdict = MembershipVerdict(
        overall=classify(ref, band),
        margin=ref,
        criteria=results,
        consistent=not bool(genuine_conflict(margins, band)),
    )
    if abs(y.p) < 1:
        beta = complex(g2_beta(y.s, y.p))
        verdict.beta = BetaPair(beta, 0j)
    if not verdict.consistent:
        verdict.notes.append("criteria disagree beyond the boundary band")
    return verdict


def embed_f(y) -> TetraPoint:
    s, p = SymPoint.of(*y)
    return TetraPoint(s / 2, s / 2, p)


def project_g(x) -> SymPoint:
    a, b, p = TetraPoint.of(*x)
    return SymPoint(a + b, p)


@dataclass(frozen=True)
class TorusCheck:
    inside: bool
    worst_z: complex
    margin: float


def tirtha_check(x, n=512, band=None) -> TorusCheck:
    """Check that (x1 + z x2, z x3) lies in G2 for n equispaced z on the circle."""
    if n < 16:
        raise ValueError("grid size must be at least 16")
    band = resolve_band(band)
    x1, x2, x3 = TetraPoint.of(*x)
    z = unit_circle(n)
    m = g2_margins(x1 + z * x2, z * x3, criteria=[G2_REFERENCE_CRITERION])[G2_REFERENCE_CRITERION]
    k = int(np.argmin(m))
    return TorusCheck(bool(m[k] > band), complex(z[k]), float(m[k]))
