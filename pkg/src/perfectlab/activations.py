"""Logistic, tanh and sine activations.

Logistic and tanh solve a first-order polynomial ODE ``g' = G(g)``; that data
(``G`` and the exact value ``g(0)``) is attached as :class:`AlgDiffData`.
Sine has none.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .polynomial import RationalPoly


class Kind(str, enum.Enum):
    LOGISTIC = "logistic"
    TANH = "tanh"
    SIN = "sin"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AlgDiffData:
    G: RationalPoly
    g0: Fraction

    def __post_init__(self):
        if self.G.degree < 1:
            raise ValueError("G must have positive degree")
        if self.G(self.g0) == 0:
            raise ValueError("G(g(0)) must be nonzero")


def algdiff_data(kind: Union[Kind, str]) -> Optional[AlgDiffData]:
    kind = Kind(kind)
    if kind is Kind.LOGISTIC:
        return AlgDiffData(RationalPoly((0, 1, -1)), Fraction(1, 2))
    if kind is Kind.TANH:
        return AlgDiffData(RationalPoly((1, 0, -1)), Fraction(0))
    return None


def _logistic(u):
    u = np.asarray(u, dtype=np.float64)
    # two branches so exp never sees a large positive argument
    e = np.exp(-np.abs(u))
    return np.where(u >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


@dataclass(frozen=True)
class Activation:
    kind: Kind

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def algdiff(self) -> Optional[AlgDiffData]:
        return algdiff_data(self.kind)

    def __call__(self, u):
        """Elementwise value; returns a Python float for scalar input."""
        if self.kind is Kind.LOGISTIC:
            out = _logistic(u)
        elif self.kind is Kind.TANH:
            out = np.tanh(np.asarray(u, dtype=np.float64))
        else:
            out = np.sin(np.asarray(u, dtype=np.float64))
        return float(out) if out.ndim == 0 else out

    def deriv(self, u):
        if self.kind is Kind.LOGISTIC:
            g = _logistic(u)
            out = g * (1.0 - g)
        elif self.kind is Kind.TANH:
            g = np.tanh(np.asarray(u, dtype=np.float64))
            out = 1.0 - g * g
        else:
            out = np.cos(np.asarray(u, dtype=np.float64))
        return float(out) if out.ndim == 0 else out

    @property
    def value_at_zero(self) -> float:
        return self(0.0)

    @property
    def deriv_at_zero(self) -> float:
        return self.deriv(0.0)


def get(kind: Union[Activation, Kind, str]) -> Activation:
    if isinstance(kind, Activation):
        return kind
    return Activation(Kind(kind))


LOGISTIC = Activation(Kind.LOGISTIC)
TANH = Activation(Kind.TANH)
SIN = Activation(Kind.SIN)
ALL = (LOGISTIC, TANH, SIN)
