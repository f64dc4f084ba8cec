"""Combinatorial psi-class weights and an independent intersection-number
oracle.

For a stable ribbon graph whose boundary cycles all have odd length, the
partition function over the odd matrix algebra of size N localizes to a sum
over decorations of the faces by {1..N}: each decorated graph contributes a
product of 1/(lambda_i(e) + lambda_j(e)) over edges (the two indices being
the decorations of the faces on either side) times a power of two.  Two
normalizations of that power are exposed:

* ``COCHAIN``: exponent V - sum(gamma) - chi, which reproduces the tensor
  contraction exactly (validated against the contraction engine);
* ``PSI``: exponent -chi, the normalization whose class sums reproduce the
  psi-class generating function (validated against the intersection-number
  oracle below).

The two differ by 2^(V - sum gamma), constant across the top-degree stratum
of any fixed (g, n).

The oracle computes <tau_{d_1} ... tau_{d_n}>_g from the string and dilaton
equations with base cases <tau_0^3>_0 = 1 and <tau_1>_1 = 1/24; values not
reachable this way (genus >= 2 in general) raise ``OracleIncomplete`` rather
than guessing.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

from .graphs import (IsoClass, StableGraph, automorphisms, canonical_or_word,
                     enumerate_stable, faces, flag_faces, surface_type)
from .scalars import LinearForm, Poly, RationalFunction

COCHAIN = "cochain"
PSI = "psi"


class OracleIncomplete(ValueError):
    pass


def double_factorial_odd(d: int) -> int:
    """(2d - 1)!! with the convention (-1)!! = 1."""
    out = 1
    for k in range(1, d + 1):
        out *= 2 * k - 1
    return out


class WKTable:
    """Memoized <tau_{d_1}...tau_{d_n}>_g via string and dilaton equations."""

    def __init__(self):
        self._memo = {}

    def value(self, g: int, ds) -> Fraction:
        ds = tuple(sorted(ds))
        n = len(ds)
        if n == 0 or any(d < 0 for d in ds):
            return Fraction(0)
        if sum(ds) != 3 * g - 3 + n:
            return Fraction(0)
        key = (g, ds)
        if key in self._memo:
            return self._memo[key]
        if (g, ds) == (0, (0, 0, 0)):
            val = Fraction(1)
        elif (g, ds) == (1, (1,)):
            val = Fraction(1, 24)
        elif ds[0] == 0 and _stable(g, n - 1):
            rest = ds[1:]
            val = Fraction(0)
            for j in range(len(rest)):
                lowered = rest[:j] + (rest[j] - 1,) + rest[j + 1:]
                if lowered[j] >= 0:
                    val += self.value(g, lowered)
        elif ds[0] == 1 and _stable(g, n - 1):
            val = (2 * g - 2 + (n - 1)) * self.value(g, ds[1:])
        else:
            raise OracleIncomplete(
                f"<tau {ds}>_{g} is outside the string/dilaton range")
        self._memo[key] = val
        return val


def _stable(g, n):
    return n >= 1 and 2 * g - 2 + n > 0


# ---------------------------------------------------------------------------
# decorated closed-form weights

def all_cycles_odd(g: StableGraph) -> bool:
    if any(e for e in g.empties):
        return False
    return all(len(c) % 2 for v in range(g.nv) for c in g.cycles_at(v))


def face_index_of_flags(g: StableGraph):
    out = {}
    for i, face in enumerate(flag_faces(g)):
        for f in face:
            out[f] = i
    return out


def closed_form_weight(g: StableGraph, decoration, nvars: int,
                       normalization=PSI) -> RationalFunction:
    """Weight of one decorated graph: a power of two over the automorphism-free
    edge product; ``decoration`` maps face index -> variable index (1-based).

    Graphs with a boundary cycle of even (or zero) length weigh zero.
    """
    if not all_cycles_odd(g):
        return RationalFunction.const(nvars, 0)
    gg, n = surface_type(g)
    chi = 2 - 2 * gg - n
    if normalization == PSI:
        expo = -chi
    else:
        expo = g.nv - sum(g.gamma) - chi
    fidx = face_index_of_flags(g)
    den = {}
    for f, fp in g.edge_list():
        i = decoration[fidx[f]]
        j = decoration[fidx[fp]]
        form = LinearForm.pair(i, j)
        den[form] = den.get(form, 0) + 1
    num = Poly.const(nvars, Fraction(2) ** expo)
    return RationalFunction(nvars, num, tuple(den.items()))


def decorated_sum(g: StableGraph, N: int, normalization=COCHAIN):
    """Sum over all maps faces -> {1..N}; with the COCHAIN normalization this
    equals the partition function of the graph over the odd matrix algebra."""
    nf = len(faces(g))
    total = RationalFunction.const(N, 0)
    if not all_cycles_odd(g):
        return total
    for dec in product(range(1, N + 1), repeat=nf):
        total = total + closed_form_weight(g, dec, N, normalization)
    return total


def class_weight_numbered(cls: IsoClass, n: int, normalization=PSI):
    """Sum over the n! puncture numberings divided by |Aut| (equivalently the
    sum over decorated isomorphism classes of 1/|Aut^dec|)."""
    g = cls.graph
    total = RationalFunction.const(n, 0)
    if not all_cycles_odd(g):
        return total
    for dec in permutations(range(1, n + 1)):
        total = total + closed_form_weight(g, dec, n, normalization)
    return total * Fraction(1, cls.aut_order)


def psi_classes(g: int, n: int, d: int):
    """Isomorphism classes entering the degree-d weight sum for type (g, n)."""
    n_edges = 2 * d + n
    return enumerate_stable(n_edges, gamma_max=g, odd_only=True,
                            type_filter=(g, n))


def psi_rhs(g: int, n: int, d: int):
    """The combinatorial side: sum over odd-cycle stable graph classes of type
    (g, n) with 2d + n edges, punctures numbered, of the psi-normalized
    weight.  Classes with orientation-reversing automorphisms vanish."""
    if not (0 <= d <= 3 * g - 3 + n):
        raise ValueError("degree outside 0..3g-3+n")
    total = RationalFunction.const(n, 0)
    per_graph = []
    for cls in psi_classes(g, n, d):
        if cls.orientation_reversing:
            continue
        w = class_weight_numbered(cls, n, PSI)
        per_graph.append((cls, w))
        total = total + w
    return total, per_graph


def psi_lhs(g: int, n: int, d: int, table: WKTable | None = None):
    """The intersection-number side: sum over d_1 + .. + d_n = d of
    <tau_d1 .. tau_dn>_g prod (2 d_i - 1)!! / lambda_i^(2 d_i + 1)."""
    table = table or WKTable()
    total = RationalFunction.const(n, 0)
    for ds in _compositions(d, n):
        coeff = table.value(g, ds)
        if coeff == 0:
            continue
        num = Poly.const(n, coeff)
        den = {}
        for i, di in enumerate(ds, start=1):
            num = num * double_factorial_odd(di)
            den[LinearForm.single(i)] = 2 * di + 1
        total = total + RationalFunction(n, num, tuple(den.items()))
    return total


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def psi_check(g: int, n: int, d: int):
    """Compare both sides at degree d; top degree pairs against the
    fundamental cycle.  Returns a report dict with exact values."""
    lhs = psi_lhs(g, n, d)
    rhs, per_graph = psi_rhs(g, n, d)
    return {
        "g": g,
        "n": n,
        "d": d,
        "match": lhs == rhs,
        "lhs": lhs,
        "rhs": rhs,
        "classes": per_graph,
    }
