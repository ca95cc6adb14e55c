"""Brute-force ground truth and the equivalence sweep harness.

The grid oracles exploit one exact reduction: for fixed ``z`` each pencil is
affine in ``w``, ``f(z, w) = alpha(z) - w beta(z)``, so its smallest modulus
over ``|w| <= r`` is ``max(0, |alpha| - r |beta|)``. The signed quantity
``|alpha| - r |beta|`` is minimised over a polar grid in ``z`` and then refined
locally (a shrinking polar stencil, vectorised over many problems, or an
L-BFGS-B polish for a single problem). A negative minimum certifies a zero inside the bidisc; a positive
one means no zero was found on the grid.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .complex_core import d_norm_arrays, unit_circle
from .domains import (
    SymPoint,
    TetraPoint,
    classify_array,
    closure_margin,
    symmetric_completion_arrays,
    tetra_margins,
)
from .jsonio import encode_complex, encode_real
from .schwarz import g2_condition_margins, g2_lempert_arrays, tetra_condition_margins
from .settings import DEFAULT_BAND

CHUNK = 10_000


def chebyshev_radii(n, r=1.0):
    """n radii in (0, r], clustered toward r."""
    k = np.arange(1, n + 1)
    return r * np.sin(0.5 * np.pi * k / n)


def polar_points(n, r=1.0):
    return (chebyshev_radii(n, r)[:, None] * unit_circle(n)[None, :]).ravel()


# ---------------------------------------------------------------------------
# pencil oracles


def _pencil_slack(alpha, beta, z, r):
    return np.abs(alpha(z)) - r * np.abs(beta(z))


def _polish(alpha, beta, z0, r):
    """Locally minimise the signed slack starting from grid point z0 (polar coordinates)."""
    def fun(v):
        z = v[0] * np.exp(1j * v[1])
        return float(np.abs(alpha(z)) - r * np.abs(beta(z)))

    res = minimize(fun, [abs(z0), np.angle(z0)], method="L-BFGS-B",
                   bounds=[(0.0, r), (None, None)], options={"ftol": 1e-15, "gtol": 1e-12})
    z = res.x[0] * np.exp(1j * res.x[1])
    return float(res.fun), complex(z)


def pencil_minimum(alpha, beta, n, r, polish=True):
    """Signed minimum of |alpha(z)| - r |beta(z)| over the z-grid, and its location."""
    z = np.concatenate([[0j], polar_points(n, r)])
    vals = _pencil_slack(alpha, beta, z, r)
    order = np.argsort(vals)
    best, zbest = float(vals[order[0]]), complex(z[order[0]])
    if polish:
        for k in order[:3]:
            v, zk = _polish(alpha, beta, z[k], r)
            if v < best:
                best, zbest = v, zk
    return best, zbest


def _w_argmin(a, b, r):
    if b == 0:
        return 0j
    w = a / b
    return w if abs(w) <= r else r * w / abs(w)


ZOOM_ROUNDS = 30
ZOOM_CANDIDATES = 3
_STENCIL = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


def pencil_minimum_arrays(a0, a1, b0, b1, n=64, r=1.0, rounds=ZOOM_ROUNDS, chunk=1000):
    """Signed minimum of |a0 + a1 z| - r |b0 + b1 z| over |z| <= r, for many pencils at once.

    A polar grid locates the best few points for each pencil; each is then
    refined by repeatedly evaluating a 5x5 polar stencil around the current
    best point and halving the stencil. Returns ``(slack, z)`` arrays.
    """
    a0, a1, b0, b1 = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v, dtype=complex)) for v in (a0, a1, b0, b1)))
    out_v = np.empty(a0.shape, dtype=float)
    out_z = np.empty(a0.shape, dtype=complex)
    grid = np.concatenate([[0j], polar_points(n, r)])
    d_rho0, d_theta0 = 0.5 * np.pi * r / n, 2 * np.pi / n
    for s in range(0, a0.size, chunk):
        sl = slice(s, s + chunk)
        A0, A1, B0, B1 = (v[sl, None] for v in (a0, a1, b0, b1))
        vals = np.abs(A0 + A1 * grid) - r * np.abs(B0 + B1 * grid)
        k = min(ZOOM_CANDIDATES, grid.size)
        idx = np.argpartition(vals, k - 1, axis=1)[:, :k]
        rho = np.abs(grid[idx])
        theta = np.angle(grid[idx])
        best = np.take_along_axis(vals, idx, axis=1)
        A0, A1, B0, B1 = (v[..., None] for v in (A0, A1, B0, B1))
        d_rho, d_theta = d_rho0, d_theta0
        for _ in range(rounds):
            rr = np.clip(rho[..., None, None] + d_rho * _STENCIL[:, None], 0.0, r)
            tt = theta[..., None, None] + d_theta * _STENCIL[None, :]
            z = (rr * np.exp(1j * tt)).reshape(*rho.shape, -1)
            v = np.abs(A0 + A1 * z) - r * np.abs(B0 + B1 * z)
            j = np.argmin(v, axis=-1)
            vj = np.take_along_axis(v, j[..., None], axis=-1)[..., 0]
            zj = np.take_along_axis(z, j[..., None], axis=-1)[..., 0]
            better = vj < best
            best = np.where(better, vj, best)
            rho = np.where(better, np.abs(zj), rho)
            theta = np.where(better, np.angle(zj), theta)
            d_rho, d_theta = d_rho / 2, d_theta / 2
        c = np.argmin(best, axis=1)
        rows = np.arange(best.shape[0])
        out_v[sl] = best[rows, c]
        out_z[sl] = rho[rows, c] * np.exp(1j * theta[rows, c])
    return out_v, out_z


def condition7_grid_arrays(lam, a, b, p, n=64, r=1.0, rounds=ZOOM_ROUNDS):
    """Vectorised grid slack of the two condition (7) pencils; a failed guard gives ``-inf``.

    Returns the larger branch slack per problem; ``>= -band`` means no zero found.
    """
    lam, a, b, p = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v, dtype=complex)) for v in (lam, a, b, p)))
    s1, _ = pencil_minimum_arrays(lam, -a, b * lam, -p, n, r, rounds)
    s2, _ = pencil_minimum_arrays(lam, -a * lam, b, -p, n, r, rounds)
    s1 = np.where(np.abs(b) <= np.abs(a), s1, -np.inf)
    s2 = np.where(np.abs(a) <= np.abs(b), s2, -np.inf)
    return np.maximum(s1, s2)


def bidisc_nonvanishing(x, n=64, r=0.999, polish=False):
    """Minimum of |1 - z x1 - w x2 + z w x3| over the radius-r bidisc (grid in z, exact in w).

    Returns ``(min_modulus, (z, w))``.
    """
    if n < 16:
        raise ValueError("grid size must be at least 16")
    if not 0 < r < 1:
        raise ValueError("radius must lie in (0, 1)")
    x1, x2, x3 = TetraPoint.of(*x)
    alpha = lambda z: 1 - z * x1  # noqa: E731
    beta = lambda z: x2 - z * x3  # noqa: E731
    slack, z = pencil_minimum(alpha, beta, n, r, polish=polish)
    return max(0.0, slack), (z, _w_argmin(alpha(z), beta(z), r))


@dataclass
class Condition7Grid:
    nonvanishing: bool
    min_modulus: tuple
    slack: tuple
    witness_z: tuple


def condition7_grid(lambda0, x, n=64, r=1.0, band=DEFAULT_BAND, polish=True) -> Condition7Grid:
    """Grid verdict on whether the branch pencils of condition (7) avoid zero on the bidisc.

    Branch 1 (guard |b| <= |a|) is ``lam - a z - b lam w + p z w``; branch 2
    (guard |a| <= |b|) is ``lam - a lam z - b w + p z w``. With ``r = 1`` the
    signed slack is zero exactly on the boundary of the feasible set, so it is
    classified with the same band as the analytic margins. A branch whose
    guard fails gets slack ``-inf``.
    """
    a, b, p = TetraPoint.of(*x)
    lam = complex(lambda0)
    branches = [
        (abs(b) <= abs(a), lambda z: lam - a * z, lambda z: b * lam - p * z),
        (abs(a) <= abs(b), lambda z: lam - a * lam * z, lambda z: b - p * z),
    ]
    slacks, zs = [], []
    for guard, alpha, beta in branches:
        s, z = pencil_minimum(alpha, beta, n, r, polish=polish)
        slacks.append(s if guard else -np.inf)
        zs.append(z)
    ok = max(slacks) >= -band
    return Condition7Grid(ok, tuple(max(0.0, s) for s in slacks), tuple(slacks), tuple(zs))


def sup_norm_psi_arrays(x1, x2, x3, n=4096, chunk=512):
    """Grid sup of |Psi(., x)| on n equispaced circle points, for many points at once."""
    z = unit_circle(n)[None, :]
    x1, x2, x3 = (np.atleast_1d(np.asarray(v, dtype=complex)) for v in (x1, x2, x3))
    out = np.empty(x1.shape, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in range(0, x1.size, chunk):
            a, b, c = (v[s:s + chunk, None] for v in (x1, x2, x3))
            out[s:s + chunk] = np.max(np.abs((c * z - a) / (b * z - 1)), axis=1)
    return out


# ---------------------------------------------------------------------------
# samplers


def _random_matrices(rng, n):
    return rng.normal(size=(n, 2, 2)) + 1j * rng.normal(size=(n, 2, 2))


def _points_of(mats):
    return mats[:, 0, 0], mats[:, 1, 1], mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]


def _balanced_unit(rng, n):
    """Random symmetric (hence minimal-norm) completions scaled to norm 1."""
    x1, x2, x3 = _points_of(_random_matrices(rng, n))
    s = symmetric_completion_arrays(x1, x2, x3)
    return s / np.linalg.norm(s, ord=2, axis=(1, 2))[:, None, None]


SHELL_FRACTION = 0.2
SHELL_WIDTH = 0.02


def sample_tetra_arrays(n, seed):
    """Interior points of E as arrays (x1, x2, x3).

    Each point is (a11, a22, det A) for a symmetric 2x2 matrix A. Norms are
    sqrt(u) for u uniform, except a fixed fraction drawn from the shell
    1 - SHELL_WIDTH < |A| < 1 so that near-boundary points are well represented.
    """
    rng = np.random.default_rng(seed)
    mats = _balanced_unit(rng, n)
    u = rng.uniform(size=n)
    shell = rng.uniform(size=n) < SHELL_FRACTION
    norms = np.where(shell, 1 - SHELL_WIDTH * (1 - u), np.sqrt(u))
    norms = np.minimum(norms, 1 - 1e-12)
    return _points_of(mats * norms[:, None, None])


def sample_tetra(n, seed):
    return [TetraPoint(complex(a), complex(b), complex(c)) for a, b, c in zip(*sample_tetra_arrays(n, seed))]


def _uniform_disc(rng, n, radius=1.0):
    return radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))


def sample_g2_arrays(n, seed, radius=1.0):
    """(z1 + z2, z1 z2) for z1, z2 uniform in the disc of the given radius (< 1)."""
    rng = np.random.default_rng(seed)
    z1, z2 = _uniform_disc(rng, n, radius), _uniform_disc(rng, n, radius)
    return z1 + z2, z1 * z2


def sample_g2(n, seed, radius=1.0):
    return [SymPoint(complex(s), complex(p)) for s, p in zip(*sample_g2_arrays(n, seed, radius))]


def sample_membership_mix(n, seed):
    """Mixed points of C^3: interior, exact boundary, near-boundary on both sides, exterior.

    Kinds (one fifth each): interior balanced samples; unit-norm symmetric
    matrices (on the boundary) perturbed by relative 1e-7..1e-2 outward or
    inward; radial inflation by 1.05..3; uniform points of the box
    [-2, 2]^6. Exact boundary points are included at the inward/outward split.
    """
    rng = np.random.default_rng(seed)
    kind = rng.integers(0, 5, size=n)
    mats = _balanced_unit(rng, n)
    delta = 10 ** rng.uniform(-7, -2, size=n)
    exact = rng.uniform(size=n) < 0.1
    delta = np.where(exact, 0.0, delta)
    t = np.select(
        [kind == 0, kind == 1, kind == 2, kind == 3],
        [np.sqrt(rng.uniform(size=n)), 1 + delta, 1 - delta, rng.uniform(1.05, 3.0, size=n)],
        default=1.0,
    )
    x1, x2, x3 = _points_of(mats * t[:, None, None])
    box = kind == 4

    def boxed():
        return rng.uniform(-2, 2, size=n) + 1j * rng.uniform(-2, 2, size=n)

    return np.where(box, boxed(), x1), np.where(box, boxed(), x2), np.where(box, boxed(), x3), kind


def sample_lambda(rng, n, threshold):
    """Half uniform in the punctured disc; half within relative 1e-8..1e-1 of the threshold."""
    near = rng.uniform(size=n) < 0.5
    sign = np.where(rng.uniform(size=n) < 0.5, -1.0, 1.0)
    rel = 10 ** rng.uniform(-8, -1, size=n)
    mod = np.where(near, threshold * (1 + sign * rel), np.sqrt(rng.uniform(size=n)))
    mod = np.clip(mod, 1e-6, 1 - 1e-9)
    return mod * np.exp(2j * np.pi * rng.uniform(size=n))


# ---------------------------------------------------------------------------
# sweep


@dataclass
class SweepConfig:
    n_samples: int = 10_000
    seed: int = 42
    tolerance_band: float = DEFAULT_BAND
    torus_grid: int = 4096
    bidisc_grid: int = 64
    campaign: str = "tetra"
    grid_samples: Optional[int] = None
    mutate: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        if self.torus_grid < 16 or self.bidisc_grid < 16:
            raise ValueError("grid sizes must be at least 16")
        if self.campaign not in ("membership", "tetra", "g2"):
            raise ValueError(f"unknown campaign {self.campaign!r}")


@dataclass
class DisagreementRecord:
    problem: dict
    condition_ids: tuple
    margins: tuple
    classification: str


@dataclass
class SweepReport:
    config: SweepConfig
    summary: dict
    records: list = field(default_factory=list)

    def to_json(self):
        return {
            "config": asdict(self.config),
            "summary": self.summary,
            "records": [
                {
                    "problem": r.problem,
                    "condition_ids": list(r.condition_ids),
                    "margins": [encode_real(m) for m in r.margins],
                    "classification": r.classification,
                }
                for r in self.records
            ],
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=2)

    @property
    def healthy(self):
        """No genuine disagreement among the analytic conditions or with the bidisc grid."""
        return self.summary["genuine_disagreements"] == 0 and self.summary["grid_disagreements"] == 0


def _pairwise_records(margins, band, problem_of, limit):
    """Records for every index where two conditions conflict; returns (records, genuine, within)."""
    ids = list(margins)
    stacked = np.stack([margins[i] for i in ids])
    hi = stacked.max(axis=0)
    lo = stacked.min(axis=0)
    signs = classify_array(stacked, band)
    genuine = (hi > band) & (lo < -band)
    mixed = (signs.max(axis=0) != signs.min(axis=0)) & ~genuine
    records = []
    for k in np.flatnonzero(genuine | mixed)[:limit]:
        i, j = int(np.argmax(stacked[:, k])), int(np.argmin(stacked[:, k]))
        records.append(
            DisagreementRecord(
                problem_of(k),
                (ids[i], ids[j]),
                (float(stacked[i, k]), float(stacked[j, k])),
                "genuine" if genuine[k] else "within-band",
            )
        )
    return records, int(genuine.sum()), int(mixed.sum())


def _apply_mutation(margins, mutate):
    if mutate is None:
        return margins
    if mutate not in margins:
        raise ValueError(f"cannot mutate unknown condition {mutate!r}")
    margins = dict(margins)
    margins[mutate] = -margins[mutate]
    return margins


def _chunk_seeds(cfg):
    n_chunks = -(-cfg.n_samples // CHUNK)
    return [(cfg.seed ^ k, min(CHUNK, cfg.n_samples - k * CHUNK), k * CHUNK) for k in range(n_chunks)]


def _run_chunk(cfg, seed, n, offset, record_limit):
    band = cfg.tolerance_band
    rng = np.random.default_rng(seed)
    out = {"genuine": 0, "within_band": 0, "records": [], "grid": [], "sup": [], "sup_checked": 0,
           "sup_gap_max": 0.0}
    if cfg.campaign == "membership":
        x1, x2, x3, kind = sample_membership_mix(n, seed)
        margins = _apply_mutation(tetra_margins(x1, x2, x3), cfg.mutate)

        def problem_of(k):
            return {"index": offset + int(k), "kind": int(kind[k]),
                    "point": [encode_complex(x1[k]), encode_complex(x2[k]), encode_complex(x3[k])]}
    elif cfg.campaign == "tetra":
        x1, x2, x3 = sample_tetra_arrays(n, seed)
        lam = sample_lambda(rng, n, np.maximum(d_norm_arrays(x1, x2, x3), d_norm_arrays(x2, x1, x3)))
        margins = _apply_mutation(tetra_condition_margins(x1, x2, x3, lam), cfg.mutate)

        def problem_of(k):
            return {"index": offset + int(k), "lambda0": encode_complex(lam[k]),
                    "point": [encode_complex(x1[k]), encode_complex(x2[k]), encode_complex(x3[k])]}
    else:
        s, p = sample_g2_arrays(n, seed)
        lam = sample_lambda(rng, n, g2_lempert_arrays(s, p))
        margins = _apply_mutation(g2_condition_margins(s, p, lam), cfg.mutate)

        def problem_of(k):
            return {"index": offset + int(k), "lambda0": encode_complex(lam[k]),
                    "point": [encode_complex(s[k]), encode_complex(p[k])]}

    recs, g, w = _pairwise_records(margins, band, problem_of, record_limit)
    out.update(genuine=g, within_band=w, records=recs)
    out["feasible"] = int((margins["2"] > band).sum()) if cfg.campaign != "membership" else None
    out["interior"] = int((margins["6"] > band).sum()) if cfg.campaign == "membership" else None

    limit = cfg.n_samples if cfg.grid_samples is None else cfg.grid_samples
    n_grid = max(0, min(n, limit - offset))
    out["grid_checked"] = n_grid if cfg.campaign == "tetra" else 0
    if n_grid and cfg.campaign == "tetra":
        out["grid"] = _grid_checks(cfg, x1[:n_grid], x2[:n_grid], x3[:n_grid], lam[:n_grid],
                                   margins["7"][:n_grid], problem_of)
    elif n_grid and cfg.campaign == "membership":
        out["sup"], out["sup_checked"], out["sup_gap_max"] = _sup_checks(
            cfg, x1[:n_grid], x2[:n_grid], x3[:n_grid], problem_of)
    return out


SUP_GAP_TOL = 1e-6


def _sup_checks(cfg, x1, x2, x3, problem_of):
    """Closed-form D(x) against a torus grid; returns (records, checked, max gap)."""
    keep = np.flatnonzero(np.abs(x2) <= 0.95)
    closed = d_norm_arrays(x1[keep], x2[keep], x3[keep])
    gap = np.abs(closed - sup_norm_psi_arrays(x1[keep], x2[keep], x3[keep], cfg.torus_grid))
    recs = [
        DisagreementRecord(problem_of(keep[j]), ("d_norm", "sup_norm_grid"),
                           (float(closed[j]), float(gap[j])), "sup-gap")
        for j in np.flatnonzero(gap > SUP_GAP_TOL)
    ]
    return recs, len(keep), float(gap.max()) if len(keep) else 0.0


def _grid_checks(cfg, x1, x2, x3, lam, analytic7, problem_of):
    band = cfg.tolerance_band
    g = condition7_grid_arrays(lam, x1, x2, x3, n=cfg.bidisc_grid)
    m = np.asarray(analytic7, dtype=float)
    bad = ((g > band) & (m < -band)) | ((g < -band) & (m > band))
    return [
        DisagreementRecord(problem_of(k), ("7", "condition7_grid"), (float(m[k]), float(g[k])), "genuine")
        for k in np.flatnonzero(bad)
    ]


def equivalence_sweep(cfg: SweepConfig, record_limit=1000) -> SweepReport:
    """Sample problems, evaluate every condition, and collect disagreements.

    Samples are generated in fixed chunks of ``CHUNK`` with seed ``seed ^ k``
    for chunk ``k``, so results do not depend on ``workers``.
    """
    t0 = time.perf_counter()
    chunks = _chunk_seeds(cfg)
    if cfg.workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda c: _run_chunk(cfg, *c, record_limit), chunks))
    else:
        parts = [_run_chunk(cfg, *c, record_limit) for c in chunks]
    records, grid_records, sup_records = [], [], []
    for part in parts:
        records.extend(part["records"])
        grid_records.extend(part["grid"])
        sup_records.extend(part["sup"])
    summary = {
        "campaign": cfg.campaign,
        "n_samples": cfg.n_samples,
        "genuine_disagreements": sum(p["genuine"] for p in parts),
        "within_band_disagreements": sum(p["within_band"] for p in parts),
        "grid_checked": sum(p["grid_checked"] for p in parts),
        "grid_disagreements": len(grid_records),
        "sup_checked": sum(p["sup_checked"] for p in parts),
        "sup_gap_max": max(p["sup_gap_max"] for p in parts) if parts else 0.0,
        "sup_gap_exceeded": len(sup_records),
        "mutated_condition": cfg.mutate,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    key = "interior" if cfg.campaign == "membership" else "feasible"
    summary[key] = sum(p[key] for p in parts)
    return SweepReport(cfg, summary, (records + grid_records + sup_records)[:record_limit])
