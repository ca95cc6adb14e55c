"""Explicit analytic discs through the origin and a target point.

``build_interpolant_tetra`` tries, in order:

* S1, the scaled disc ``lam -> (lam a/l0, lam b/l0, lam^2 p/l0^2)`` when
  ``(a/l0, b/l0, p/l0^2)`` lies in the closure of E;
* S2, the beta disc: with ``y = (a/l0, b, p/l0)`` and its canonical beta pair,
  ``lam -> (lam (b1 + conj(b2) z), b2 + conj(b1) z, lam z)`` where ``z`` is a
  Schur function with ``z(0) = -b2/conj(b1)`` and ``z(l0) = p/l0``;
* S3, a numerical search over polynomial corrections of the S1 disc that keep
  both endpoints exact.

Targets with ``|a| < |b|`` are handled by swapping the first two coordinates
(S0). Nothing is returned unless it passes :func:`verify_interpolant`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from . import expr as ex
from .complex_core import solve_two_point_pick, unit_circle
from .domains import (
    SymPoint,
    TetraPoint,
    beta_decompose,
    closure_margin,
    g2_closure_margin,
    spectral_norm_2x2,
)
from .errors import (
    ConstructionIncomplete,
    InfeasibleProblem,
    MalformedInput,
    OnTorusX3,
    OutsideDisc,
    PickInfeasible,
    WitnessNotConstructed,
)
from .schwarz import SchwarzProblem, tetra_condition_margins
from .settings import resolve_band

log = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-9
MARGIN_TOL = 1e-9


@dataclass(frozen=True)
class AnalyticDisc:
    components: tuple
    strategy: str
    swapped: bool = False

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        return np.stack([np.broadcast_to(c(lam), lam.shape) for c in self.components])

    @property
    def dimension(self):
        return len(self.components)

    def to_json(self):
        return {
            "strategy": self.strategy,
            "swapped": self.swapped,
            "components": [c.to_json() for c in self.components],
        }

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or not isinstance(data.get("components"), list):
            raise MalformedInput("disc must be an object with a 'components' list")
        comps = tuple(ex.from_json(c) for c in data["components"])
        if len(comps) not in (2, 3):
            raise MalformedInput("disc must have 2 or 3 components")
        return cls(comps, str(data.get("strategy", "external")), bool(data.get("swapped", False)))


@dataclass
class InterpolantReport:
    endpoint_err_0: float
    endpoint_err_lambda0: float
    worst_membership_margin: float
    worst_point: complex
    verified: bool


def polar_grid(n_radii=64, n_angles=64):
    """Points of the closed disc on Chebyshev-clustered radii (ending at 1) times equispaced angles."""
    k = np.arange(1, n_radii + 1)
    radii = np.sin(0.5 * np.pi * k / n_radii)
    return (radii[:, None] * unit_circle(n_angles)[None, :]).ravel()


def _target_array(prob):
    return np.array(list(prob.target), dtype=complex)


def verify_interpolant(disc: AnalyticDisc, prob: SchwarzProblem, n=64, m=None) -> InterpolantReport:
    """Endpoint errors and the worst membership margin of the disc over a polar grid."""
    if n < 64:
        raise ValueError("verification grid needs at least 64 angles")
    m = n if m is None else m
    target = _target_array(prob)
    if disc.dimension != len(target):
        raise MalformedInput("disc dimension does not match the target")
    err0 = float(np.max(np.abs(disc(0.0))))
    err1 = float(np.max(np.abs(disc(prob.lambda0) - target)))
    pts = polar_grid(m, n)
    vals = disc(pts)
    if disc.dimension == 3:
        margins = closure_margin(*vals)
    else:
        margins = g2_closure_margin(vals[0], vals[1])
    margins = np.where(np.isnan(margins), -np.inf, margins)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    ok = err0 <= ENDPOINT_TOL and err1 <= ENDPOINT_TOL and worst >= -MARGIN_TOL
    return InterpolantReport(err0, err1, worst, complex(pts[k]), bool(ok))


def _require_feasible(a, b, p, lam, band):
    m = float(tetra_condition_margins(a, b, p, lam)["2"])
    if m < -band:
        raise InfeasibleProblem(f"no analytic disc reaches {(a, b, p)} at {lam} (margin {m:.3g})")


def _scaled_disc(a, b, p, lam):
    L = ex.LAMBDA
    return AnalyticDisc(
        (ex.mul(ex.const(a / lam), L), ex.mul(ex.const(b / lam), L), ex.mul(ex.const(p / lam**2), L, L)),
        "S1",
    )


def _beta_disc(a, b, p, lam, band):
    y = (a / lam, b, p / lam)
    b1, b2 = beta_decompose(y, tol=band)
    L = ex.LAMBDA
    if b1 == 0 and b2 == 0:
        return AnalyticDisc((ex.const(0), ex.const(0), ex.mul(ex.const(p / lam), L)), "S2")
    if abs(b2) > abs(b1):
        raise PickInfeasible("|beta2| > |beta1|: z(0) would leave the disc")
    zeta = solve_two_point_pick(0, -b2 / b1.conjugate(), lam, y[2], tol=band).expr
    comps = (
        ex.mul(L, ex.add(ex.const(b1), ex.mul(ex.const(b2.conjugate()), zeta))),
        ex.add(ex.const(b2), ex.mul(ex.const(b1.conjugate()), zeta)),
        ex.mul(L, zeta),
    )
    return AnalyticDisc(comps, "S2")


def _correction_disc(a, b, p, lam, coeffs):
    L = ex.LAMBDA
    bump = ex.mul(L, ex.add(L, ex.const(-lam)))
    base = _scaled_disc(a, b, p, lam).components
    comps = tuple(ex.add(c, ex.mul(ex.const(k), bump)) for c, k in zip(base, coeffs))
    return AnalyticDisc(comps, "S3")


def _search_disc(a, b, p, lam, seed=0):
    """Minimise the worst membership violation over corrections lam (lam - l0) c_k."""
    coarse = polar_grid(16, 48)
    rng = np.random.default_rng(seed)

    def violation(v):
        disc = _correction_disc(a, b, p, lam, v[0::2] + 1j * v[1::2])
        return -float(np.min(closure_margin(*disc(coarse))))

    best = None
    for start in [np.zeros(6)] + [rng.normal(scale=0.3, size=6) for _ in range(3)]:
        res = minimize(violation, start, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        if best is None or res.fun < best.fun:
            best = res
        if best.fun < -1e-6:
            break
    return _correction_disc(a, b, p, lam, best.x[0::2] + 1j * best.x[1::2])


def _swap_disc(disc: AnalyticDisc):
    c = disc.components
    return AnalyticDisc((c[1], c[0], c[2]), disc.strategy, swapped=True)


def build_interpolant_tetra(prob: SchwarzProblem, band=None, strategies=("S1", "S2", "S3")) -> AnalyticDisc:
    band = resolve_band(band)
    a, b, p = TetraPoint.of(*prob.target)
    lam = prob.lambda0
    _require_feasible(a, b, p, lam, band)
    swapped = abs(a) < abs(b)
    if swapped:
        a, b = b, a
    inner = SchwarzProblem(lam, TetraPoint(a, b, p))
    diagnostics = {}
    for name in strategies:
        try:
            if name == "S1":
                if float(closure_margin(a / lam, b / lam, p / lam**2)) < -band:
                    diagnostics[name] = "scaled point outside the closure"
                    continue
                disc = _scaled_disc(a, b, p, lam)
            elif name == "S2":
                disc = _beta_disc(a, b, p, lam, band)
            elif name == "S3":
                disc = _search_disc(a, b, p, lam)
            else:
                raise ValueError(f"unknown strategy {name!r}")
        except (OnTorusX3, PickInfeasible, OutsideDisc) as exc:
            diagnostics[name] = str(exc)
            continue
        report = verify_interpolant(disc, inner)
        if report.verified:
            return _swap_disc(disc) if swapped else disc
        diagnostics[name] = (
            f"failed verification: endpoint errors {report.endpoint_err_0:.3g}, "
            f"{report.endpoint_err_lambda0:.3g}; worst margin {report.worst_membership_margin:.3g}"
        )
    log.warning("no verified interpolant for lambda0=%s target=%s: %s", lam, prob.target, diagnostics)
    raise ConstructionIncomplete(
        "no strategy produced a verified disc",
        {"lambda0": lam, "target": tuple(prob.target), "swapped": swapped, "strategies": diagnostics},
    )


def build_interpolant_g2(prob: SchwarzProblem, band=None) -> AnalyticDisc:
    """psi = g o phi, where phi interpolates (s/2, s/2, p) in the tetrablock."""
    band = resolve_band(band)
    s, p = SymPoint.of(*prob.target)
    phi = build_interpolant_tetra(SchwarzProblem(prob.lambda0, TetraPoint(s / 2, s / 2, p)), band=band)
    c = phi.components
    return AnalyticDisc((ex.add(c[0], c[1]), c[2]), "g." + phi.strategy, phi.swapped)


@dataclass
class SchurMatrixWitness:
    """F = [[f11, f12], [f21, f22]] with F(0) strictly upper triangular and F(l0) = A."""

    entries: tuple
    boundary_norm: float
    verified: bool
    method: str

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        f = [np.broadcast_to(e(lam), lam.shape) for e in self.entries]
        return np.stack([np.stack([f[0], f[1]], -1), np.stack([f[2], f[3]], -1)], -2)

    def to_json(self):
        return {
            "method": self.method,
            "entries": [e.to_json() for e in self.entries],
            "boundary_norm": self.boundary_norm,
            "verified": self.verified,
        }


def _quadratic_split(b1, b2):
    """Factor (b1 + conj(b2) w)(b2 + conj(b1) w) - w as k1(w) k2(w) with |k1| = |k2| on |w| = 1.

    The quadratic is conj(c) w^2 + m w + c with c = b1 b2 and m real, so its
    roots are mirror images in the unit circle: r1 inside, r2 = 1/conj(r1)
    outside. On the circle |w - r2| = |r2| |w - r1|, which fixes the balancing
    constant. When |m| <= 2|c| (only at |b1| + |b2| = 1, i.e. on the
    threshold) the roots merge into a double root on the circle.
    """
    c = b1 * b2
    lead = c.conjugate()
    m = abs(b1) ** 2 + abs(b2) ** 2 - 1
    if c == 0:
        # linear (or constant) polynomial m w: split it evenly
        if m == 0:
            return (0j, 0j), (0j, 0j)
        root = complex(np.sqrt(abs(m)))
        return (0j, root), (0j, m / root)
    if abs(m) <= 2 * abs(c):
        r1 = -m / (2 * lead)
        r1 /= abs(r1)
        r2 = r1
    else:
        disc = np.sqrt(m * m - 4 * abs(c) ** 2)
        r2 = (-m - np.copysign(disc, m)) / (2 * lead)
        r1 = 1 / r2.conjugate()
    kappa = complex(np.sqrt(abs(lead) * abs(r2)))
    # k(w) = k0 + k1 w
    return (-kappa * r1, kappa), (-lead * r2 / kappa, lead / kappa)


def _poly(coeffs, arg):
    c0, c1 = coeffs
    return ex.add(ex.const(c0), ex.mul(ex.const(c1), arg))


def _witness_entries(prob, disc, band):
    a, b, p = TetraPoint.of(*prob.target)
    lam = prob.lambda0
    if disc.swapped:
        a, b = b, a
    L = ex.LAMBDA
    if disc.strategy == "S1":
        off = complex(np.sqrt(a * b / lam**2 - p / lam**2))
        f11, f22 = ex.mul(ex.const(a / lam), L), ex.mul(ex.const(b / lam), L)
        return (f11, ex.const(off), ex.mul(ex.const(off), L, L), f22), "scaled-completion"
    if disc.strategy == "S2":
        b1, b2 = beta_decompose((a / lam, b, p / lam), tol=band)
        if b1 == 0 and b2 == 0:
            zeta = ex.mul(ex.const(p / lam**2), L)
        else:
            zeta = solve_two_point_pick(0, -b2 / b1.conjugate(), lam, p / lam, tol=band).expr
        k1, k2 = _quadratic_split(b1, b2)
        f11 = ex.mul(L, ex.add(ex.const(b1), ex.mul(ex.const(b2.conjugate()), zeta)))
        f22 = ex.add(ex.const(b2), ex.mul(ex.const(b1.conjugate()), zeta))
        return (f11, _poly(k1, zeta), ex.mul(L, _poly(k2, zeta)), f22), "beta-factorisation"
    return None, None


def _unswap(entries):
    # P F^T P keeps F(0) strictly upper triangular and swaps the diagonal
    f11, f12, f21, f22 = entries
    return (f22, f12, f21, f11)


def _constant_offdiagonal(disc, n):
    phi1, phi2, phi3 = disc.components
    z = unit_circle(n)
    v1, v2, v3 = phi1(z), phi2(z), phi3(z)
    q = v1 * v2 - v3
    zero = ex.const(0)
    if np.max(np.abs(q)) <= 1e-14:
        return (phi1, zero, zero, phi2)

    def norm_at(log_c):
        c = np.exp(log_c)
        return float(np.max(spectral_norm_2x2(v1, c, q / c, v2)))

    centre = 0.5 * np.log(np.max(np.abs(q)))
    res = minimize_scalar(norm_at, bracket=(centre - 3, centre), method="brent")
    c = float(np.exp(res.x))
    f21 = ex.mul(ex.const(1 / c), ex.add(ex.mul(phi1, phi2), ex.mul(ex.const(-1), phi3)))
    return (phi1, ex.const(c), f21, phi2)


def schur_matrix_witness(prob: SchwarzProblem, disc: AnalyticDisc, n=1024, band=None) -> SchurMatrixWitness:
    """Assemble a 2x2 Schur-class function F whose diagonal and determinant give the disc.

    For an S1 disc, F = diag(1, lam) B diag(lam, 1) with B the symmetric
    completion of the scaled point. For an S2 disc the off-diagonal entries
    are a balanced factorisation of phi1 phi2 - phi3 along the beta curve.
    Otherwise f12 is a constant c and f21 = (phi1 phi2 - phi3)/c, with |c|
    chosen to minimise the boundary norm. The result is checked on n circle
    points (the norm of an analytic matrix function peaks on the boundary).
    """
    band = resolve_band(band)
    if disc.dimension != 3:
        raise ValueError("matrix witness needs a tetrablock disc")
    if not verify_interpolant(disc, prob).verified:
        raise WitnessNotConstructed("disc is not a verified interpolant")
    entries, method = _witness_entries(prob, disc, band)
    if entries is None:
        entries, method = _constant_offdiagonal(disc, n), "constant-offdiagonal"
    elif disc.swapped:
        entries = _unswap(entries)
    witness = SchurMatrixWitness(entries, 0.0, False, method)
    vals = witness(unit_circle(n))
    norm = float(np.max(np.linalg.norm(vals, ord=2, axis=(-2, -1))))
    f0 = witness(0.0)
    f_end = witness(prob.lambda0)
    a, b, p = prob.target
    ends = max(abs(f0[0, 0]), abs(f0[1, 0]), abs(f0[1, 1]),
               abs(f_end[0, 0] - a), abs(f_end[1, 1] - b), abs(np.linalg.det(f_end) - p))
    witness = SchurMatrixWitness(entries, norm, bool(norm <= 1 + MARGIN_TOL and ends <= ENDPOINT_TOL), method)
    if not witness.verified:
        raise WitnessNotConstructed(f"boundary norm {norm:.6g}, endpoint error {ends:.3g}", witness)
    return witness
