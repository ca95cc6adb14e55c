import os

#: Half-width of the boundary band used to turn a signed margin into a tri-state.
DEFAULT_BAND = 1e-9

#: Below this modulus a linear-fractional denominator is treated as a pole.
DENOM_FLOOR = 1e-14

#: Relative tolerance for detecting the degenerate case x1*x2 == x3.
DEGENERATE_RTOL = 1e-12

TOL_ENV_VAR = "MU_DOMAINS_TOL"


def default_band():
    """Return the boundary band, honouring the ``MU_DOMAINS_TOL`` override."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw == "":
        return DEFAULT_BAND
    band = float(raw)
    if not band >= 0.0:
        raise ValueError(f"{TOL_ENV_VAR} must be a non-negative number, got {raw!r}")
    return band


def resolve_band(band):
    return default_band() if band is None else float(band)
