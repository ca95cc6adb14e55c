"""Small expression trees for analytic functions of one variable ``lam``.

Nodes are immutable and evaluate elementwise on numpy arrays. The JSON form
uses node types ``lambda``, ``const``, ``add``, ``mul`` and ``blaschke``; a
``blaschke`` node with point ``a`` and unimodular ``u`` wraps an inner
expression ``e`` as ``u * (e - a) / (1 - conj(a) * e)``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import MalformedInput
from .jsonio import decode_complex, encode_complex


class Expr:
    def __call__(self, lam):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Lam(Expr):
    def __call__(self, lam):
        return np.asarray(lam, dtype=complex)

    def to_json(self):
        return {"type": "lambda"}


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (cmath.isfinite(v)):
            raise ValueError("constant must be finite")
        object.__setattr__(self, "value", v)

    def __call__(self, lam):
        return np.full(np.shape(lam), self.value, dtype=complex)

    def to_json(self):
        return {"type": "const", "value": encode_complex(self.value)}


@dataclass(frozen=True)
class Add(Expr):
    args: tuple

    def __call__(self, lam):
        return reduce(np.add, (a(lam) for a in self.args))

    def to_json(self):
        return {"type": "add", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Mul(Expr):
    args: tuple

    def __call__(self, lam):
        return reduce(np.multiply, (a(lam) for a in self.args))

    def to_json(self):
        return {"type": "mul", "args": [a.to_json() for a in self.args]}


@dataclass(frozen=True)
class Blaschke(Expr):
    a: complex
    u: complex
    arg: Expr

    def __post_init__(self):
        a, u = complex(self.a), complex(self.u)
        if not abs(a) < 1:
            raise ValueError(f"Blaschke point must lie in the open disc, got {a}")
        if abs(abs(u) - 1) > 1e-12:
            raise ValueError(f"Blaschke rotation must be unimodular, got {u}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "u", u)

    def __call__(self, lam):
        e = self.arg(lam)
        return self.u * (e - self.a) / (1 - self.a.conjugate() * e)

    def to_json(self):
        return {
            "type": "blaschke",
            "a": encode_complex(self.a),
            "u": encode_complex(self.u),
            "arg": self.arg.to_json(),
        }


LAMBDA = Lam()


def const(c):
    return Const(complex(c))


def add(*args):
    args = tuple(a for a in args if not (isinstance(a, Const) and a.value == 0))
    if not args:
        return Const(0)
    if len(args) == 1:
        return args[0]
    if all(isinstance(a, Const) for a in args):
        return Const(sum(a.value for a in args))
    return Add(args)


def mul(*args):
    if any(isinstance(a, Const) and a.value == 0 for a in args):
        return Const(0)
    consts = [a.value for a in args if isinstance(a, Const)]
    rest = [a for a in args if not isinstance(a, Const)]
    c = reduce(lambda u, v: u * v, consts, 1 + 0j)
    if not rest:
        return Const(c)
    if c != 1:
        rest.insert(0, Const(c))
    if len(rest) == 1:
        return rest[0]
    return Mul(tuple(rest))


def mobius(a, arg, u=1):
    """``u * (arg - a) / (1 - conj(a) arg)``, or ``arg`` itself when it is the identity."""
    if complex(a) == 0 and complex(u) == 1:
        return arg
    if isinstance(arg, Const):
        return Const(Blaschke(a, u, arg)(0).item())
    return Blaschke(a, u, arg)


def from_json(node):
    if not isinstance(node, dict) or "type" not in node:
        raise MalformedInput(f"expression node must be an object with a 'type', got {node!r}")
    kind = node["type"]
    try:
        if kind == "lambda":
            return LAMBDA
        if kind == "const":
            return Const(decode_complex(node["value"], "const.value"))
        if kind in ("add", "mul"):
            args = node["args"]
            if not isinstance(args, list) or not args:
                raise MalformedInput(f"'{kind}' needs a non-empty 'args' list")
            parsed = tuple(from_json(a) for a in args)
            return Add(parsed) if kind == "add" else Mul(parsed)
        if kind == "blaschke":
            return Blaschke(
                decode_complex(node["a"], "blaschke.a"),
                decode_complex(node["u"], "blaschke.u"),
                from_json(node["arg"]),
            )
    except KeyError as exc:
        raise MalformedInput(f"'{kind}' node is missing field {exc}") from None
    except ValueError as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(str(exc)) from None
    raise MalformedInput(f"unknown expression node type {kind!r}")
