"""Two-point Schwarz feasibility from the origin for E and G2.

A problem asks whether some analytic map of the disc sends 0 to the origin
and ``lambda0`` to a target point. Each equivalent condition is evaluated on
its own and reported as a signed margin, so that the equivalences can be
tested against each other. Conditions of the either/or form carry a
"psi" branch (|b| <= |a|) and an "upsilon" branch (|a| <= |b|); a branch
whose guard fails gets margin ``-inf``, and the condition's margin is the
larger of the two.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .complex_core import as_complex, d_norm_arrays, psi_sup_via_image
from .domains import (
    BetaPair,
    Matrix2,
    SymPoint,
    TetraPoint,
    beta_arrays,
    beta_decompose,
    classify,
    closure_margin,
    embed_f,
    g2_closure_margin,
    genuine_conflict,
    matrix_completion,
    tetra_margins,
)
from .errors import HypothesisViolated, InfeasibleProblem, OnTorusX3, OutsideDomain
from .settings import resolve_band


@dataclass(frozen=True)
class SchwarzProblem:
    lambda0: complex
    target: Union[TetraPoint, SymPoint]

    def __post_init__(self):
        object.__setattr__(self, "lambda0", as_complex(self.lambda0, "lambda0"))
        if not 0 < abs(self.lambda0) < 1:
            raise ValueError(f"lambda0 must satisfy 0 < |lambda0| < 1, got {self.lambda0}")

    @classmethod
    def tetra(cls, lambda0, x):
        return cls(lambda0, TetraPoint.of(*x))

    @classmethod
    def g2(cls, lambda0, y):
        return cls(lambda0, SymPoint.of(*y))


class Feasibility(str, enum.Enum):
    FEASIBLE = "feasible"
    BOUNDARY = "boundary"
    INFEASIBLE = "infeasible"


_FROM_VERDICT = {"interior": Feasibility.FEASIBLE, "boundary": Feasibility.BOUNDARY,
                 "exterior": Feasibility.INFEASIBLE}


def classify_feasibility(margin, band=None) -> Feasibility:
    return _FROM_VERDICT[classify(margin, band).value]


@dataclass(frozen=True)
class ConditionResult:
    id: str
    verdict: Feasibility
    margin: float


@dataclass
class ConditionReport:
    feasible: Feasibility
    conditions: list
    branch: str
    lempert: float
    beta: Optional[BetaPair] = None
    matrix: Optional[Matrix2] = None
    consistent: bool = True
    notes: list = field(default_factory=list)

    def margin(self, cid):
        return next(c.margin for c in self.conditions if c.id == cid)


# ---------------------------------------------------------------------------
# tetrablock conditions


def _either(guard1, m1, guard2, m2):
    return np.maximum(np.where(guard1, m1, -np.inf), np.where(guard2, m2, -np.inf))


def _quotients(a, b, p):
    """The two quotients of the max condition: D(a, b, p) and D(b, a, p)."""
    return d_norm_arrays(a, b, p), d_norm_arrays(b, a, p)


def tetra_condition_margins(a, b, p, lam):
    """Signed margins of the equivalent feasibility conditions, vectorised.

    Keys are the condition numbers "2", "3", "5" ... "10". Condition (4), the
    matrix Schur-class witness, is realised constructively in
    :mod:`mu_domains.interpolate` rather than decided here.
    """
    a, b, p, lam = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, p, lam)))
    L = np.abs(lam)
    L2 = L * L
    br1 = np.abs(b) <= np.abs(a)
    br2 = np.abs(a) <= np.abs(b)
    out = {}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q1, q2 = _quotients(a, b, p)
        out["2"] = L - np.maximum(q1, q2)
        out["3"] = _either(br1, L - q1, br2, L - q2)
        out["5"] = _either(br1, L - psi_sup_via_image(a, b, p), br2, L - psi_sup_via_image(b, a, p))

        abs2 = lambda z: np.abs(z) ** 2  # noqa: E731
        lhs6_1 = abs2(a) - L2 * abs2(b) + abs2(p) + 2 * np.abs(L2 * b - np.conj(a) * p)
        lhs6_2 = abs2(b) - L2 * abs2(a) + abs2(p) + 2 * np.abs(L2 * a - np.conj(b) * p)
        out["6"] = _either(br1, L2 - lhs6_1, br2, L2 - lhs6_2)

        # non-vanishing of the pencil <=> rescaled point lies in the closure of E,
        # decided with the minimal-completion-norm criterion
        y1 = (a / lam, b, p / lam)
        y2 = (a, b / lam, p / lam)
        m7_1 = tetra_margins(*y1, criteria=["7"])["7"]
        m7_2 = tetra_margins(*y2, criteria=["7"])["7"]
        out["7"] = _either(br1, m7_1, br2, m7_2)

        lhs8_1 = L * np.abs(a - np.conj(b) * p) + np.abs(L2 * b - np.conj(a) * p) + abs2(p)
        lhs8_2 = L * np.abs(b - np.conj(a) * p) + np.abs(L2 * a - np.conj(b) * p) + abs2(p)
        out["8"] = _either(br1, L2 - lhs8_1, br2, L2 - lhs8_2)

        cross = 2 * L * np.abs(a * b - p)
        lhs9_1 = abs2(a) + L2 * abs2(b) - abs2(p) + cross
        lhs9_2 = abs2(b) + L2 * abs2(a) - abs2(p) + cross
        gp = L - np.abs(p)
        out["9"] = _either(br1, np.minimum(gp, L2 - lhs9_1), br2, np.minimum(gp, L2 - lhs9_2))

        out["10"] = _either(br1, _beta_margin(*y1), br2, _beta_margin(*y2))
    return {k: np.asarray(v, dtype=float) for k, v in out.items()}


def _beta_margin(y1, y2, y3):
    inside = np.abs(y3) < 1
    b1, b2 = beta_arrays(y1, y2, np.where(inside, y3, 0))
    m = np.minimum(1 - np.abs(y3), 1 - np.abs(b1) - np.abs(b2))
    return np.where(inside, m, 1 - np.abs(y3))


TETRA_CONDITIONS = ("2", "3", "5", "6", "7", "8", "9", "10")


def _fired_branch(a, b, p, lam, band):
    L = abs(lam)
    q1, q2 = (float(v) for v in _quotients(a, b, p))
    fired = []
    if abs(b) <= abs(a) and L - q1 >= -band:
        fired.append("psi")
    if abs(a) <= abs(b) and L - q2 >= -band:
        fired.append("upsilon")
    if len(fired) == 2:
        return "both"
    return fired[0] if fired else "none"


def _check_hypotheses(point_margin, band, what):
    notes = []
    if point_margin <= band:
        notes.append(f"hypothesis violated: target is not an interior point of {what}")
        warnings.warn(notes[-1], HypothesisViolated, stacklevel=3)
    return notes


def tetra_feasibility(prob: SchwarzProblem, band=None) -> ConditionReport:
    band = resolve_band(band)
    a, b, p = TetraPoint.of(*prob.target)
    lam = prob.lambda0
    notes = _check_hypotheses(float(closure_margin(a, b, p)), band, "E")
    margins = tetra_condition_margins(a, b, p, lam)
    conditions = [
        ConditionResult(cid, classify_feasibility(float(m), band), float(m)) for cid, m in margins.items()
    ]
    report = ConditionReport(
        feasible=classify_feasibility(float(margins["2"]), band),
        conditions=conditions,
        branch=_fired_branch(a, b, p, lam, band),
        lempert=float(np.max(_quotients(a, b, p))),
        consistent=not bool(genuine_conflict(margins, band)),
        notes=notes,
    )
    if not report.consistent:
        report.notes.append("conditions disagree beyond the boundary band")
    if report.feasible is not Feasibility.INFEASIBLE:
        try:
            report.beta, report.branch = condition10_witness(prob, band=band)
        except (OnTorusX3, InfeasibleProblem) as exc:
            report.notes.append(f"no condition (10) witness: {exc}")
        if float(closure_margin(a, b, p)) >= -band:
            report.matrix = matrix_completion((a, b, p), symmetric=True)
    return report


def lempert_origin_tetra(x, band=None) -> float:
    """Smallest |lambda0| for which the origin-based problem with target x is solvable."""
    band = resolve_band(band)
    a, b, p = TetraPoint.of(*x)
    if float(closure_margin(a, b, p)) < -band:
        raise OutsideDomain(f"{x} is outside the tetrablock")
    return float(np.max(_quotients(a, b, p)))


def condition10_witness(prob: SchwarzProblem, band=None):
    """The beta pair of condition (10) together with the branch that produced it."""
    band = resolve_band(band)
    a, b, p = TetraPoint.of(*prob.target)
    lam = prob.lambda0
    q1, q2 = (float(v) for v in _quotients(a, b, p))
    L = abs(lam)
    if L - max(q1, q2) < -band:
        raise InfeasibleProblem(f"no analytic disc reaches {prob.target} at {lam}")
    if abs(b) <= abs(a):
        branch, y = "psi", (a / lam, b, p / lam)
    else:
        branch, y = "upsilon", (a, b / lam, p / lam)
    pair = beta_decompose(y, tol=band)
    return pair, branch


# ---------------------------------------------------------------------------
# symmetrized bidisc conditions


def g2_lempert_arrays(s, p):
    s, p = np.asarray(s, dtype=complex), np.asarray(p, dtype=complex)
    den = 4 - np.abs(s) ** 2
    num = 2 * np.abs(s - np.conj(s) * p) + np.abs(s * s - 4 * p)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def g2_condition_margins(s, p, lam, with_tetra=True):
    """Signed margins for the symmetrized-bidisc conditions "2", "4" ... "9".

    Condition (9) is the specialisation a = b = s/2 of the tetrablock beta
    condition. With ``with_tetra`` the tetrablock conditions on (s/2, s/2, p)
    are appended under keys "E2" ... "E10".
    """
    s, p, lam = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (s, p, lam)))
    L = np.abs(lam)
    L2 = L * L
    abs2 = lambda z: np.abs(z) ** 2  # noqa: E731
    sbar = np.conj(s)
    out = {}
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out["2"] = L - g2_lempert_arrays(s, p)
        out["4"] = L - psi_sup_via_image(s / 2, s / 2, p)
        out["5"] = 4 * L2 - ((1 - L2) * abs2(s) + 4 * abs2(p) + 4 * np.abs(L2 * s - sbar * p))
        # 2 lam - (z + lam w) s + 2 p z w never vanishes <=> (s/(2 lam), s/2, p/lam) in closure of E
        out["6"] = tetra_margins(s / (2 * lam), s / 2, p / lam, criteria=["3"])["3"]
        out["7"] = 2 * L2 - (L * np.abs(s - sbar * p) + np.abs(L2 * s - sbar * p) + 2 * abs2(p))
        lhs8 = (1 + L2) * abs2(s) - 4 * abs2(p) + 2 * L * np.abs(s * s - 4 * p)
        out["8"] = np.minimum(L - np.abs(p), 4 * L2 - lhs8)
        out["9"] = _beta_margin(s / (2 * lam), s / 2, p / lam)
    out = {k: np.asarray(v, dtype=float) for k, v in out.items()}
    if with_tetra:
        for k, v in tetra_condition_margins(s / 2, s / 2, p, lam).items():
            out["E" + k] = v
    return out


G2_CONDITIONS = ("2", "4", "5", "6", "7", "8", "9")


def g2_condition9_as_printed(s, p, lam):
    """Margin of the single-beta form of condition (9) exactly as typeset.

    It asks for |p| <= |lam| and some |beta| <= 1 with s = 2 beta lam + 2 conj(beta) p
    or lam s = 2 beta lam + 2 conj(beta) p. This form is NOT equivalent to the other
    conditions; it is kept for comparison only and is not part of the battery.
    """
    s, p, lam = (np.asarray(v, dtype=complex) for v in (s, p, lam))
    q = p / lam
    d = 1 - np.abs(q) ** 2

    def unique_beta(sig):
        # sig = beta + conj(beta) q has a unique solution when |q| != 1
        return (sig - np.conj(sig) * q) / d

    first = 1 - np.abs(unique_beta(s / (2 * lam)))
    second = 1 - np.abs(unique_beta(s / 2))
    return np.minimum(np.abs(lam) - np.abs(p), np.maximum(first, second))


def g2_feasibility(prob: SchwarzProblem, band=None) -> ConditionReport:
    band = resolve_band(band)
    s, p = SymPoint.of(*prob.target)
    lam = prob.lambda0
    gm = float(g2_closure_margin(s, p))
    notes = _check_hypotheses(gm, band, "G2")
    margins = g2_condition_margins(s, p, lam)
    conditions = [
        ConditionResult(cid, classify_feasibility(float(m), band), float(m)) for cid, m in margins.items()
    ]
    report = ConditionReport(
        feasible=classify_feasibility(float(margins["2"]), band),
        conditions=conditions,
        branch="both",
        lempert=float(g2_lempert_arrays(s, p)),
        consistent=not bool(genuine_conflict(margins, band)),
        notes=notes,
    )
    if not report.consistent:
        report.notes.append("conditions disagree beyond the boundary band")
    if report.feasible is not Feasibility.INFEASIBLE:
        try:
            report.beta, _ = condition10_witness(SchwarzProblem(lam, embed_f((s, p))), band=band)
        except (OnTorusX3, InfeasibleProblem) as exc:
            report.notes.append(f"no beta witness: {exc}")
        if gm >= -band:
            report.matrix = matrix_completion(embed_f((s, p)), symmetric=True)
    return report


def lempert_origin_g2(y, band=None) -> float:
    band = resolve_band(band)
    s, p = SymPoint.of(*y)
    if float(g2_closure_margin(s, p)) < -band:
        raise OutsideDomain(f"{y} is outside the symmetrized bidisc")
    return float(g2_lempert_arrays(s, p))
