"""JSON encoding helpers: complex numbers travel as ``[re, im]`` pairs."""
import math
from numbers import Real

from .errors import MalformedInput


def encode_complex(z):
    z = complex(z)
    return [encode_real(z.real), encode_real(z.imag)]


def encode_real(v):
    """Floats pass through; non-finite values become the strings ``"inf"``/``"-inf"``/``"nan"``."""
    v = float(v)
    if math.isfinite(v):
        return v
    if math.isnan(v):
        return "nan"
    return "inf" if v > 0 else "-inf"


def decode_real(v, what="number"):
    if isinstance(v, str) and v in ("inf", "-inf"):
        return float(v)
    if isinstance(v, bool) or not isinstance(v, Real):
        raise MalformedInput(f"{what}: expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        raise MalformedInput(f"{what}: non-finite value")
    return v


def decode_complex(v, what="complex"):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise MalformedInput(f"{what}: expected [re, im], got {v!r}")
    re = decode_real(v[0], what)
    im = decode_real(v[1], what)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise MalformedInput(f"{what}: components must be finite")
    return complex(re, im)
