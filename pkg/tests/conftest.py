import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def disc_points(radius=0.999):
    """Complex numbers of modulus at most ``radius``."""
    return st.builds(
        lambda r, t: r * np.exp(2j * np.pi * t),
        st.floats(0, radius),
        st.floats(0, 1, exclude_max=True),
    )


def punctured_disc(lo=1e-3, hi=0.999):
    return st.builds(
        lambda r, t: r * np.exp(2j * np.pi * t),
        st.floats(lo, hi),
        st.floats(0, 1, exclude_max=True),
    )


def complexes(bound=3.0):
    return st.builds(complex, st.floats(-bound, bound), st.floats(-bound, bound))


@st.composite
def tetra_interior(draw, max_norm=0.999, symmetric=False, exact_norm=False):
    """(a11, a22, det A) for a 2x2 matrix with operator norm at most max_norm.

    Symmetric matrices are minimal-norm completions of their point, so with
    ``exact_norm`` they give points on the boundary of the closure.
    """
    a11, a12, a21, a22 = (draw(complexes(1.0)) for _ in range(4))
    if symmetric:
        a21 = a12
    a = np.array([[a11, a12], [a21, a22]], dtype=complex)
    norm = np.linalg.norm(a, 2)
    if norm < 1e-6:
        return (0j, 0j, 0j)
    a = a * ((max_norm if exact_norm else draw(st.floats(0, max_norm))) / norm)
    return (complex(a[0, 0]), complex(a[1, 1]), complex(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]))


@st.composite
def g2_interior(draw, radius=0.999):
    z1, z2 = draw(disc_points(radius)), draw(disc_points(radius))
    return (complex(z1 + z2), complex(z1 * z2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_line(request):
    """Record the one-line verdict of an acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(criterion, passed, detail):
        line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'} ({detail})"
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
