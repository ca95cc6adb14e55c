import json

import numpy as np
import pytest
from hypothesis import given

from mu_domains import expr as ex
from mu_domains.errors import MalformedInput

from conftest import complexes, disc_points

L = ex.LAMBDA


def test_builders_fold_constants():
    assert ex.add(ex.const(1), ex.const(2j)) == ex.Const(1 + 2j)
    assert ex.mul(ex.const(2), ex.const(3)) == ex.Const(6)
    assert ex.mul(ex.const(0), L) == ex.Const(0)
    assert ex.add(ex.const(0), L) is L
    assert ex.mul(ex.const(1), L) is L
    assert ex.mobius(0, L) is L


def test_mobius_of_constant_is_constant():
    c = ex.mobius(0.5, ex.const(0.5))
    assert isinstance(c, ex.Const)
    assert c.value == 0


def test_blaschke_validation():
    with pytest.raises(ValueError):
        ex.Blaschke(1.0, 1, L)
    with pytest.raises(ValueError):
        ex.Blaschke(0.2, 2, L)


@given(disc_points(0.95), disc_points(0.9))
def test_blaschke_is_unimodular_on_circle_and_maps_a_to_zero(a, z):
    b = ex.mobius(a, L, u=np.exp(0.3j))
    circle = np.exp(2j * np.pi * np.arange(64) / 64)
    np.testing.assert_allclose(np.abs(b(circle)), 1, atol=1e-12)
    assert abs(b(a)) < 1e-12
    assert abs(b(z)) < 1


@given(complexes(), complexes(), disc_points(0.8))
def test_json_round_trip_preserves_values(c1, c2, a):
    tree = ex.add(ex.mul(ex.const(c1), L, ex.mobius(a, L)), ex.const(c2))
    text = json.dumps(tree.to_json())
    back = ex.from_json(json.loads(text))
    z = np.array([0, 0.3, -0.5j, 0.99 * np.exp(1j)])
    np.testing.assert_array_equal(back(z), tree(z))


@pytest.mark.parametrize(
    "node",
    [
        None,
        {"kind": "lambda"},
        {"type": "pow"},
        {"type": "const"},
        {"type": "const", "value": [1]},
        {"type": "const", "value": ["x", 0]},
        {"type": "add", "args": []},
        {"type": "mul", "args": "lambda"},
        {"type": "blaschke", "a": [1.5, 0], "u": [1, 0], "arg": {"type": "lambda"}},
        {"type": "blaschke", "a": [0, 0], "u": [1, 0]},
    ],
)
def test_from_json_rejects_malformed_nodes(node):
    with pytest.raises(MalformedInput):
        ex.from_json(node)


def test_nodes_evaluate_elementwise():
    tree = ex.mul(L, L)
    z = np.array([[0.1, 0.2], [0.3j, -0.4]])
    np.testing.assert_array_equal(tree(z), z * z)
    assert ex.const(2)(z).shape == z.shape
