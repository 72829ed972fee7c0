"""Exact derivative-polynomial recursion for activations with ``g' = G(g)``.

With ``P_0 = T`` and ``P_{k+1} = P_k' * G`` one has
``d^k/du^k g(u) = P_k(g(u))``; the helpers here build that sequence over the
rationals, find the indices ``k`` where ``P_k(g(0))`` is nonzero and certify
the generalized Vandermonde determinant those indices produce.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Optional, Sequence

from .activations import Kind, algdiff_data
from .polynomial import RationalLike, RationalPoly, as_fraction, fraction_to_str, root_multiplicity

KMAX_DEFAULT = 50
KMAX_CAP = 400


class PreconditionError(ValueError):
    pass


class ResampleNeeded(ArithmeticError):
    """The determinant vanished at the chosen nodes; pick other nodes."""


@dataclass(frozen=True)
class PkEntry:
    k: int
    poly: RationalPoly
    value_at_g0: Fraction

    def to_dict(self) -> dict:
        return {"k": self.k, "coeffs": self.poly.to_strings(), "value_at_g0": fraction_to_str(self.value_at_g0)}


@dataclass(frozen=True)
class PkSequence:
    G: RationalPoly
    g0: Fraction
    entries: tuple[PkEntry, ...]
    kind: Optional[str] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> PkEntry:
        return self.entries[k]

    @property
    def polys(self) -> list[RationalPoly]:
        return [e.poly for e in self.entries]

    @property
    def values(self) -> list[Fraction]:
        return [e.value_at_g0 for e in self.entries]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict, G: RationalPoly, g0: RationalLike) -> "PkSequence":
        entries = tuple(
            PkEntry(int(e["k"]), RationalPoly.from_strings(e["coeffs"]), Fraction(e["value_at_g0"]))
            for e in d["entries"])
        return cls(G, as_fraction(g0), entries, d.get("kind"))


def _check_hypotheses(G: RationalPoly, g0: Fraction) -> None:
    if G.degree < 1:
        raise PreconditionError("G must have positive degree")
    if G(g0) == 0:
        raise PreconditionError("G(g0) must be nonzero")


def pk_sequence(G: RationalPoly, g0: RationalLike, kmax: int = KMAX_DEFAULT,
                kind: Optional[str] = None) -> PkSequence:
    g0 = as_fraction(g0)
    _check_hypotheses(G, g0)
    if not 0 <= kmax <= KMAX_CAP:
        raise PreconditionError(f"kmax must lie in [0, {KMAX_CAP}], got {kmax}")
    P = RationalPoly.T()
    entries = []
    for k in range(kmax + 1):
        if k:
            P = P.derivative() * G
        entries.append(PkEntry(k, P, P(g0)))
    return PkSequence(G, g0, tuple(entries), kind)


def pk_sequence_for(kind, kmax: int = KMAX_DEFAULT) -> PkSequence:
    data = algdiff_data(kind)
    if data is None:
        raise PreconditionError(f"{Kind(kind).value} has no polynomial algebro-differential data")
    return pk_sequence(data.G, data.g0, kmax, Kind(kind).value)


@dataclass
class IndexSelection:
    indices: tuple[int, ...]
    # k -> multiplicity of g0 as a root of P_k, for every skipped k
    skipped: dict[int, int] = field(default_factory=dict)
    searched_up_to: int = 0


def select_indices_detail(G: RationalPoly, g0: RationalLike, p: int) -> IndexSelection:
    """The ``p`` smallest ``k`` with ``P_k(g0) != 0``.

    When ``P_k`` has ``g0`` as a root of multiplicity ``m_k`` the next
    nonvanishing index is at most ``k + m_k``; exceeding that bound means the
    recursion is broken and raises instead of searching on.
    """
    g0 = as_fraction(g0)
    _check_hypotheses(G, g0)
    if p < 1:
        raise PreconditionError("p must be positive")
    chosen: list[int] = []
    skipped: dict[int, int] = {}
    bound: Optional[int] = None
    P = RationalPoly.T()
    for k in count():
        if k:
            P = P.derivative() * G
        if P.is_zero():
            raise RuntimeError(f"P_{k} vanished identically; G = {G} violates the hypotheses")
        if P(g0) != 0:
            chosen.append(k)
            bound = None
            if len(chosen) == p:
                return IndexSelection(tuple(chosen), skipped, k)
            continue
        mult = root_multiplicity(P, g0)
        skipped[k] = mult
        if bound is None:
            bound = k + mult
        if k >= bound:
            raise RuntimeError(f"P_{k}(g0) = 0 beyond the guaranteed index {bound}")
        if k > KMAX_CAP:
            raise RuntimeError("index search exceeded the recursion cap")


def select_indices(G: RationalPoly, g0: RationalLike, p: int) -> tuple[int, ...]:
    return select_indices_detail(G, g0, p).indices


def exact_det(rows: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Determinant over the rationals by fraction-exact Gaussian elimination."""
    A = [[as_fraction(x) for x in row] for row in rows]
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("expected a square matrix")
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            det = -det
        det *= A[k][k]
        for i in range(k + 1, n):
            if A[i][k] != 0:
                r = A[i][k] / A[k][k]
                A[i] = [a - r * b for a, b in zip(A[i], A[k])]
    return det


def vandermonde_like_matrix(values, exponents, nodes) -> list[list[Fraction]]:
    c = [as_fraction(x) for x in values]
    a = [as_fraction(x) for x in nodes]
    return [[c[j] * a[i] ** exponents[j] for j in range(len(c))] for i in range(len(a))]


def vandermonde_like_det(values: Sequence[RationalLike], exponents: Sequence[int],
                         nodes: Sequence[RationalLike]) -> Fraction:
    """Exact ``det(c_j * a_i ** k_j)``; raises :class:`ResampleNeeded` if it is zero."""
    c = [as_fraction(x) for x in values]
    a = [as_fraction(x) for x in nodes]
    p = len(c)
    if len(exponents) != p or len(a) != p:
        raise PreconditionError("values, exponents and nodes must have the same length")
    if any(x == 0 for x in c):
        raise PreconditionError("column scalings must be nonzero")
    if any(k2 <= k1 for k1, k2 in zip(exponents, exponents[1:])) or (p and exponents[0] < 0):
        raise PreconditionError("exponents must be nonnegative and strictly increasing")
    if any(x <= 0 for x in a) or len(set(a)) != p:
        raise PreconditionError("nodes must be positive and distinct")
    det = exact_det(vandermonde_like_matrix(c, exponents, a))
    if det == 0:
        raise ResampleNeeded("generalized Vandermonde determinant vanished at these nodes")
    return det
