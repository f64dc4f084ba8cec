"""Z/2-graded algebras with odd invariant scalar product.

An algebra is a finite named basis with parities, sparse structure constants
and the matrix of the odd pairing g.  Elements are sparse coefficient dicts
{basis index: scalar}.  The two concrete algebras used throughout are

* ``make_E()``  -- the two-dimensional algebra <1, xi>, xi^2 = 1, xi odd,
  g(1, xi) = 1, with its odd derivation (xi -> 1) and homotopy inverse
  (1 -> xi);
* ``make_QN(N, lam)`` -- the odd matrix algebra gl(N) + Pi gl(N), realized
  inside gl(N|N) as matrices (super)commuting with the odd involution p, so
  that all multiplication signs are inherited from one embedding.  Its odd
  trace is otr(X) = str(p X)/2, the pairing is g(a, b) = otr(ab), the
  derivation is the supercommutator with Lambda = sum_i lam_i/2 * Pi E_ii and
  the standard homotopy inverse sends E_ij to 2/(lam_i+lam_j) Pi E_ij.

Operators on the algebra are dense column-action matrices: M[i][j] is the
coefficient of basis element i in M(e_j).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from . import linalg
from .scalars import LinearForm, RationalFunction, is_zero, scalar_equal


class GradedAlgebra:
    def __init__(self, names, parity, mult, gmat, zero=None, one_scalar=None):
        self.names = tuple(names)
        self.dim = len(self.names)
        self.parity = tuple(parity)
        # mult[(i, j)] -> {k: coeff}; absent key means zero product
        self.mult = {k: dict(v) for k, v in mult.items() if v}
        self.gmat = [list(row) for row in gmat]
        self.zero = zero if zero is not None else Fraction(0)
        self.one = one_scalar if one_scalar is not None else (self.zero + 1)
        self._ginv = None
        self._dual = None
        self._unit = None

    # -- element helpers ----------------------------------------------
    def basis_vec(self, i):
        return {i: self.one}

    def mul(self, x, y):
        out = {}
        for i, ci in x.items():
            if is_zero(ci):
                continue
            for j, cj in y.items():
                entry = self.mult.get((i, j))
                if not entry:
                    continue
                c = ci * cj
                for k, m in entry.items():
                    out[k] = out.get(k, self.zero) + c * m
        return {k: v for k, v in out.items() if not is_zero(v)}

    def mul_many(self, elems):
        acc = self.unit()
        for e in elems:
            acc = self.mul(acc, e)
        return acc

    def add(self, x, y):
        out = dict(x)
        for k, v in y.items():
            out[k] = out.get(k, self.zero) + v
        return {k: v for k, v in out.items() if not is_zero(v)}

    def scale(self, c, x):
        if is_zero(c):
            return {}
        return {k: c * v for k, v in x.items()}

    def g(self, x, y):
        acc = self.zero
        for i, ci in x.items():
            row = self.gmat[i]
            for j, cj in y.items():
                acc = acc + ci * cj * row[j]
        return acc

    def parity_of(self, x):
        """Parity of a homogeneous element (None for 0 or mixed)."""
        ps = {self.parity[i] for i in x}
        if len(ps) == 1:
            return ps.pop()
        return None

    def unit(self):
        """The unit element, solved from the structure constants."""
        if self._unit is None:
            rows, rhs = [], []
            for j in range(self.dim):
                for k in range(self.dim):
                    row = []
                    for i in range(self.dim):
                        row.append(self.mult.get((i, j), {}).get(k, self.zero))
                    rows.append(row)
                    rhs.append(self.one if k == j else self.zero)
            sol = linalg.solve_linear(rows, rhs)
            if sol is None:
                raise ValueError("algebra has no left unit")
            self._unit = {i: c for i, c in enumerate(sol) if not is_zero(c)}
        return dict(self._unit)

    # -- pairing-derived data -------------------------------------------
    def ginv(self):
        """Matrix inverse of g (the plain dual pairing in coordinates)."""
        if self._ginv is None:
            self._ginv = linalg.mat_inv(self.gmat)
        return self._ginv

    def dual_basis(self):
        """Vectors e^mu with g(e^mu, e_nu) = delta; e_mu is the basis itself.

        Since g is odd, parity(e^mu) = 1 - parity(e_mu).
        """
        if self._dual is None:
            h = self.ginv()
            self._dual = [
                {k: h[mu][k] for k in range(self.dim) if not is_zero(h[mu][k])}
                for mu in range(self.dim)
            ]
        return self._dual

    def apply(self, matrix, x):
        out = {}
        for j, c in x.items():
            for i in range(self.dim):
                m = matrix[i][j]
                if not is_zero(m):
                    out[i] = out.get(i, self.zero) + m * c
        return {k: v for k, v in out.items() if not is_zero(v)}

    def as_matrix(self, fn):
        """Column-action matrix of a linear map given on basis elements."""
        cols = [fn(j) for j in range(self.dim)]
        return [
            [cols[j].get(i, self.zero) for j in range(self.dim)]
            for i in range(self.dim)
        ]


# ---------------------------------------------------------------------------
# derived elements used by the vertex weights

def conjugation_element(alg: GradedAlgebra, x):
    """C(x) = sum_mu (-1)^{p(e^mu) (p(x)+1)} e^mu x e_mu -- a central element."""
    px = alg.parity_of(x)
    if px is None and x:
        raise ValueError("conjugation_element needs a homogeneous argument")
    dual = alg.dual_basis()
    out = {}
    for mu in range(alg.dim):
        emu_up = dual[mu]
        pe = 1 - alg.parity[mu]
        term = alg.mul(alg.mul(emu_up, x), alg.basis_vec(mu))
        sgn = -1 if (pe * ((px or 0) + 1)) % 2 else 1
        for k, v in term.items():
            out[k] = out.get(k, alg.zero) + (v if sgn > 0 else -v)
    return {k: v for k, v in out.items() if not is_zero(v)}


def conjugation_maps(alg: GradedAlgebra):
    """Column matrices of C restricted to even and odd arguments."""
    mats = []
    for p in (0, 1):
        cols = []
        for j in range(alg.dim):
            if alg.parity[j] == p:
                cols.append(conjugation_element(alg, alg.basis_vec(j)))
            else:
                cols.append({})
        mats.append([[cols[j].get(i, alg.zero) for j in range(alg.dim)]
                     for i in range(alg.dim)])
    return mats


def handle_element(alg: GradedAlgebra):
    """h = sum_{xi,zeta} (-1)^{p(e^xi) p(e^zeta)} e^xi e^zeta e_xi e_zeta."""
    dual = alg.dual_basis()
    out = {}
    for xi in range(alg.dim):
        for zeta in range(alg.dim):
            pe = (1 - alg.parity[xi]) * (1 - alg.parity[zeta])
            term = alg.mul_many([dual[xi], dual[zeta],
                                 alg.basis_vec(xi), alg.basis_vec(zeta)])
            sgn = -1 if pe % 2 else 1
            for k, v in term.items():
                out[k] = out.get(k, alg.zero) + (v if sgn > 0 else -v)
    return {k: v for k, v in out.items() if not is_zero(v)}


def empty_cycle_element(alg: GradedAlgebra):
    """C(1): the wrap factor contributed by a flagless boundary cycle."""
    return conjugation_element(alg, alg.unit())


# ---------------------------------------------------------------------------
# checks

def check_algebra(alg: GradedAlgebra) -> dict:
    """Axiom report: each entry is True/False (diagnostic, never raises)."""
    d = alg.dim
    ok_assoc = True
    ok_par = True
    for i, j, k in product(range(d), repeat=3):
        left = alg.mul(alg.mul(alg.basis_vec(i), alg.basis_vec(j)), alg.basis_vec(k))
        right = alg.mul(alg.basis_vec(i), alg.mul(alg.basis_vec(j), alg.basis_vec(k)))
        diff = alg.add(left, alg.scale(-alg.one, right))
        if diff:
            ok_assoc = False
            break
    for (i, j), entry in alg.mult.items():
        for k, c in entry.items():
            if is_zero(c):
                continue
            if (alg.parity[i] + alg.parity[j]) % 2 != alg.parity[k]:
                ok_par = False
    ok_odd = all(
        is_zero(alg.gmat[i][j]) or (alg.parity[i] + alg.parity[j]) % 2 == 1
        for i in range(d) for j in range(d)
    )
    ok_sym = all(
        scalar_equal(alg.gmat[i][j],
                     -alg.gmat[j][i] if alg.parity[i] * alg.parity[j] else alg.gmat[j][i])
        for i in range(d) for j in range(d)
    )
    ok_inv = True
    for i, j, k in product(range(d), repeat=3):
        ab = alg.mul(alg.basis_vec(i), alg.basis_vec(j))
        bc = alg.mul(alg.basis_vec(j), alg.basis_vec(k))
        if not scalar_equal(alg.g(ab, alg.basis_vec(k)), alg.g(alg.basis_vec(i), bc)):
            ok_inv = False
            break
    try:
        alg.ginv()
        ok_nondeg = True
    except ValueError:
        ok_nondeg = False
    # supertrace of left multiplication vanishes for every basis element
    ok_trace = True
    if ok_nondeg:
        for a in range(d):
            acc = alg.zero
            for mu in range(d):
                amu = alg.mul(alg.basis_vec(a), alg.basis_vec(mu))
                c = amu.get(mu, alg.zero)
                acc = acc + (-c if alg.parity[mu] else c)
            if not is_zero(acc):
                ok_trace = False
                break
    return {
        "associative": ok_assoc,
        "parity_additive": ok_par,
        "pairing_odd": ok_odd,
        "pairing_symmetric": ok_sym,
        "pairing_invariant": ok_inv,
        "pairing_nondegenerate": ok_nondeg,
        "left_mult_supertrace_zero": ok_trace,
    }


def check_derivation(alg: GradedAlgebra, imat) -> dict:
    """Leibniz + anti-self-adjointness report for an odd operator."""
    d = alg.dim
    ok_odd = all(
        is_zero(imat[i][j]) or (alg.parity[i] + alg.parity[j]) % 2 == 1
        for i in range(d) for j in range(d)
    )
    ok_leib = True
    for i, j in product(range(d), repeat=2):
        ab = alg.mul(alg.basis_vec(i), alg.basis_vec(j))
        lhs = alg.apply(imat, ab)
        rhs = alg.mul(alg.apply(imat, alg.basis_vec(i)), alg.basis_vec(j))
        second = alg.mul(alg.basis_vec(i), alg.apply(imat, alg.basis_vec(j)))
        if alg.parity[i]:
            second = alg.scale(-alg.one, second)
        rhs = alg.add(rhs, second)
        if alg.add(lhs, alg.scale(-alg.one, rhs)):
            ok_leib = False
            break
    ok_anti = is_anti_self_adjoint(alg, imat)
    i2 = linalg.mat_mul(imat, imat)
    square_zero = all(is_zero(x) for row in i2 for x in row)
    return {
        "odd": ok_odd,
        "leibniz": ok_leib,
        "anti_self_adjoint": ok_anti,
        "square_zero": square_zero,
    }


def is_anti_self_adjoint(alg: GradedAlgebra, mat, op_parity=1) -> bool:
    """g(Mx, y) + (-1)^{op_parity * p(x)} g(x, My) = 0 for all basis x, y."""
    d = alg.dim
    for x, y in product(range(d), repeat=2):
        mx = alg.apply(mat, alg.basis_vec(x))
        my = alg.apply(mat, alg.basis_vec(y))
        lhs = alg.g(mx, alg.basis_vec(y))
        rhs = alg.g(alg.basis_vec(x), my)
        if (op_parity * alg.parity[x]) % 2:
            rhs = -rhs
        if not is_zero(lhs + rhs):
            return False
    return True


def is_self_adjoint(alg: GradedAlgebra, mat, op_parity=1) -> bool:
    """g(Mx, y) = (-1)^{op_parity * p(x)} g(x, My) for all basis x, y."""
    d = alg.dim
    for x, y in product(range(d), repeat=2):
        mx = alg.apply(mat, alg.basis_vec(x))
        my = alg.apply(mat, alg.basis_vec(y))
        lhs = alg.g(mx, alg.basis_vec(y))
        rhs = alg.g(alg.basis_vec(x), my)
        if (op_parity * alg.parity[x]) % 2:
            rhs = -rhs
        if not scalar_equal(lhs, rhs):
            return False
    return True


def anticommutator(imat, jmat):
    return linalg.mat_add(linalg.mat_mul(imat, jmat), linalg.mat_mul(jmat, imat))


def is_identity(alg: GradedAlgebra, mat) -> bool:
    d = alg.dim
    return all(
        scalar_equal(mat[i][j], alg.one if i == j else alg.zero)
        for i in range(d) for j in range(d)
    )


# ---------------------------------------------------------------------------
# concrete algebras

def make_E():
    """<1, xi> with xi^2 = 1, xi odd, g(1, xi) = 1, I(xi) = 1, Itil(1) = xi."""
    one, zero = Fraction(1), Fraction(0)
    names = ("1", "xi")
    parity = (0, 1)
    mult = {
        (0, 0): {0: one},
        (0, 1): {1: one},
        (1, 0): {1: one},
        (1, 1): {0: one},
    }
    gmat = [[zero, one], [one, zero]]
    alg = GradedAlgebra(names, parity, mult, gmat)
    imat = [[zero, one], [zero, zero]]       # I(xi) = 1
    itil = [[zero, zero], [one, zero]]       # Itil(1) = xi
    return alg, imat, itil


def _qn_index(N):
    """Basis order: even E(i,j) blocks first, then odd PiE(i,j)."""
    evens = [(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]
    return evens


def make_QN(N: int, lam):
    """The odd matrix algebra of size N with diagonal derivation data.

    ``lam`` is a list of N scalars (Fractions or RationalFunctions); the
    pairwise sums lam_i + lam_j must be invertible.  Returns (algebra, I,
    Itil).  Basis: E(i,j) (even, matrix units) then PiE(i,j) (odd).
    """
    if len(lam) != N:
        raise ValueError("need one lambda per index")
    pairs = _qn_index(N)
    n2 = len(pairs)
    idx_even = {p: k for k, p in enumerate(pairs)}
    idx_odd = {p: n2 + k for k, p in enumerate(pairs)}
    names = [f"E{i}{j}" for (i, j) in pairs] + [f"pE{i}{j}" for (i, j) in pairs]
    parity = [0] * n2 + [1] * n2
    proto = lam[0] - lam[0]  # zero in the scalar ring of lam
    zero = proto
    one = zero + 1

    half = _scalar_half(zero)

    for i in range(N):
        for j in range(N):
            s = lam[i] + lam[j]
            if is_zero(s):
                raise ValueError(f"lambda_{i+1} + lambda_{j+1} = 0: homotopy inverse undefined")

    mult = {}

    def put(a, b, c, coeff):
        mult.setdefault((a, b), {})
        mult[(a, b)][c] = mult[(a, b)].get(c, zero) + coeff

    # E(i,j) E(k,l) = delta_jk E(i,l); products involving Pi follow the
    # gl(N|N) embedding: E*PiE -> Pi(EE), PiE*E -> Pi(EE), PiE*PiE -> EE.
    for (i, j) in pairs:
        for (k, l) in pairs:
            if j != k:
                continue
            put(idx_even[(i, j)], idx_even[(k, l)], idx_even[(i, l)], one)
            put(idx_even[(i, j)], idx_odd[(k, l)], idx_odd[(i, l)], one)
            put(idx_odd[(i, j)], idx_even[(k, l)], idx_odd[(i, l)], one)
            put(idx_odd[(i, j)], idx_odd[(k, l)], idx_even[(i, l)], one)

    dim = 2 * n2
    gmat = [[zero for _ in range(dim)] for _ in range(dim)]
    # g(a, b) = otr(ab); otr(PiE(i,j)) = delta_ij, otr vanishes on the even part
    for (i, j) in pairs:
        for (k, l) in pairs:
            if j == k and l == i:
                gmat[idx_even[(i, j)]][idx_odd[(k, l)]] = one
                gmat[idx_odd[(k, l)]][idx_even[(i, j)]] = one

    alg = GradedAlgebra(names, parity, mult, gmat, zero=zero)

    imat = [[zero for _ in range(dim)] for _ in range(dim)]
    itil = [[zero for _ in range(dim)] for _ in range(dim)]
    for (i, j) in pairs:
        e, o = idx_even[(i, j)], idx_odd[(i, j)]
        imat[o][e] = half * (lam[i - 1] - lam[j - 1])
        imat[e][o] = half * (lam[i - 1] + lam[j - 1])
        itil[o][e] = (one + one) / (lam[i - 1] + lam[j - 1])
    return alg, imat, itil


def _scalar_half(zero):
    one = zero + 1
    return one / (one + one)


def qn_symbolic(N: int):
    """Q(N) over rational functions in lambda_1..lambda_N."""
    lam = [RationalFunction.var(N, i) for i in range(1, N + 1)]
    return make_QN(N, lam)


def propagator_matrix(alg: GradedAlgebra, itil):
    """Coordinates of the edge two-tensor built from the homotopy inverse.

    K[mu][nu] is the coefficient of basis mu (at the first flag of the edge)
    and basis nu (at the second).  K = (Itil*)^T H with Itil* = G^T Itil
    (G^T)^{-1} and H = G^{-1}.
    """
    gt = linalg.transpose(alg.gmat)
    itil_star = linalg.mat_mul(gt, linalg.mat_mul(itil, linalg.mat_inv(gt)))
    return linalg.mat_mul(linalg.transpose(itil_star), alg.ginv())


def pairing_inverse_matrix(alg: GradedAlgebra):
    """Coordinates of the two-tensor dual to g (used for edge insertion)."""
    return alg.ginv()
