"""Exact arithmetic on finite sums of ``c * s**p * log(s)**m``.

The coefficients ``c`` are numpy arrays sharing one batch shape, so a single
expression describes the same closed form for many rarefaction fans at once.
Exponents are plain floats that depend only on gamma; two exponents closer
than about 1e-10 are merged.

Such sums are closed under addition, multiplication, differentiation and
integration, which is all that is needed to integrate the linear transport
equations inside a centred fan.
"""
from __future__ import annotations

import numpy as np

_KEY_DIGITS = 10
RESONANCE_TOL = 1e-9


def _key(p: float) -> float:
    return round(float(p), _KEY_DIGITS)


class PowerLog:
    """Sum of terms ``c * s**p * ln(s)**m`` with array coefficients."""

    __slots__ = ("terms", "shape")

    def __init__(self, terms=None, shape=()):
        # terms: {(pkey, m): (p, coeff)}
        self.terms = {} if terms is None else terms
        self.shape = tuple(shape)

    # construction -------------------------------------------------------
    @classmethod
    def monomial(cls, p: float, coeff, m: int = 0) -> "PowerLog":
        coeff = np.asarray(coeff, dtype=float)
        return cls({(_key(p), m): (float(p), coeff.copy())}, coeff.shape)

    @classmethod
    def constant(cls, coeff) -> "PowerLog":
        return cls.monomial(0.0, coeff)

    @classmethod
    def zero(cls, shape=()) -> "PowerLog":
        return cls({}, shape)

    def _add_term(self, p, m, c):
        k = (_key(p), m)
        if k in self.terms:
            p0, c0 = self.terms[k]
            self.terms[k] = (p0, c0 + c)
        else:
            self.terms[k] = (float(p), np.array(c, dtype=float))

    def copy(self) -> "PowerLog":
        return PowerLog({k: (p, c.copy()) for k, (p, c) in self.terms.items()}, self.shape)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PowerLog):
            return other
        return PowerLog.constant(np.broadcast_to(np.asarray(other, dtype=float), self.shape))

    def __add__(self, other):
        other = self._coerce(other)
        out = self.copy()
        out.shape = np.broadcast_shapes(self.shape, other.shape)
        for (_, m), (p, c) in other.terms.items():
            out._add_term(p, m, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return PowerLog({k: (p, -c) for k, (p, c) in self.terms.items()}, self.shape)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, PowerLog):
            c = np.asarray(other, dtype=float)
            return PowerLog({k: (p, cc * c) for k, (p, cc) in self.terms.items()},
                            np.broadcast_shapes(self.shape, c.shape))
        out = PowerLog.zero(np.broadcast_shapes(self.shape, other.shape))
        for (_, m1), (p1, c1) in self.terms.items():
            for (_, m2), (p2, c2) in other.terms.items():
                out._add_term(p1 + p2, m1 + m2, c1 * c2)
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1.0 / np.asarray(other, dtype=float))

    def shift(self, q: float) -> "PowerLog":
        """Multiply by ``s**q``."""
        out = PowerLog.zero(self.shape)
        for (_, m), (p, c) in self.terms.items():
            out._add_term(p + q, m, c)
        return out

    # calculus -----------------------------------------------------------
    def deriv(self) -> "PowerLog":
        out = PowerLog.zero(self.shape)
        for (_, m), (p, c) in self.terms.items():
            if p != 0.0:
                out._add_term(p - 1.0, m, p * c)
            if m > 0:
                out._add_term(p - 1.0, m - 1, m * c)
        return out

    def antideriv(self) -> "PowerLog":
        """An antiderivative; exponents within ``RESONANCE_TOL`` of -1 produce logs."""
        out = PowerLog.zero(self.shape)
        for (_, m), (p, c) in self.terms.items():
            _integrate_term(out, p, m, c)
        return out

    # evaluation ---------------------------------------------------------
    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        extra = s.ndim - len(self.shape)
        if extra < 0:
            raise ValueError("evaluation point must carry the batch shape")
        tot = np.zeros(np.broadcast_shapes(s.shape, self.shape + (1,) * extra))
        ls = np.log(s)
        for (_, m), (p, c) in self.terms.items():
            cc = c.reshape(c.shape + (1,) * extra) if extra else c
            term = cc * s ** p
            if m:
                term = term * ls ** m
            tot = tot + term
        return tot

    def __repr__(self):
        parts = [f"s^{p:.6g}ln^{m}" if m else f"s^{p:.6g}" for (_, m), (p, _) in self.terms.items()]
        return f"PowerLog(shape={self.shape}, [{', '.join(parts)}])"


def _integrate_term(out: PowerLog, p: float, m: int, c) -> None:
    if abs(p + 1.0) < RESONANCE_TOL:
        out._add_term(0.0, m + 1, c / (m + 1))
        return
    # int s^p L^m = s^{p+1} L^m/(p+1) - m/(p+1) int s^p L^{m-1}
    out._add_term(p + 1.0, m, c / (p + 1.0))
    if m > 0:
        _integrate_term(out, p, m - 1, -m * c / (p + 1.0))


def solve_linear_ode(q: float, forcing: PowerLog, s0, x0) -> PowerLog:
    """Exact solution of ``X'(s) = (q/s) X + f(s)`` with ``X(s0) = x0``.

    Returns ``X(s) = s**q [x0 s0**-q + F(s) - F(s0)]`` where ``F`` is an
    antiderivative of ``s**-q f``.
    """
    s0 = np.asarray(s0, dtype=float)
    F = forcing.shift(-q).antideriv()
    const = np.asarray(x0, dtype=float) * s0 ** (-q) - F(s0)
    return (F + const).shift(q)
