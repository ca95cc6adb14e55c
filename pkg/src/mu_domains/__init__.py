"""Membership tests, Schwarz-lemma feasibility and explicit interpolants for the
tetrablock E in C^3 and the symmetrized bidisc G2 in C^2."""
from .complex_core import (
    INFINITE,
    DiscImage,
    LinearFractional,
    SchurFunction,
    d_norm,
    eval_lf,
    psi,
    psi_image_disc,
    pseudohyperbolic,
    solve_two_point_pick,
    sup_norm_grid,
    upsilon,
)
from .domains import (
    BetaPair,
    Matrix2,
    MembershipVerdict,
    SymPoint,
    TetraPoint,
    Verdict,
    beta_decompose,
    embed_f,
    g2_membership,
    matrix_completion,
    project_g,
    tetra_membership,
    tirtha_check,
)
from .errors import (
    ConstructionIncomplete,
    HypothesisViolated,
    InfeasibleProblem,
    MalformedInput,
    MuDomainsError,
    OutsideDomain,
    PickInfeasible,
    WitnessNotConstructed,
)
from .interpolate import (
    AnalyticDisc,
    InterpolantReport,
    SchurMatrixWitness,
    build_interpolant_g2,
    build_interpolant_tetra,
    schur_matrix_witness,
    verify_interpolant,
)
from .oracle import SweepConfig, SweepReport, bidisc_nonvanishing, condition7_grid, equivalence_sweep
from .schwarz import (
    ConditionReport,
    Feasibility,
    SchwarzProblem,
    g2_feasibility,
    lempert_origin_g2,
    lempert_origin_tetra,
    tetra_feasibility,
)

__version__ = "0.1.0"
