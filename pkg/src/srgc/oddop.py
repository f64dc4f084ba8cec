"""Block decomposition of odd anti-self-adjoint operators and homotopy
inverses.

The canonical decomposition splits V into: nilpotent blocks spanned by a
single I-chain pairing with itself (type 1_k, 2k vectors), nilpotent blocks
spanned by two I-chains pairing with each other (type 2_k, two chains of
length k), and a part on which I is invertible (type 3).  An odd self-adjoint
Itil with I Itil + Itil I = 1 exists iff no block of type 2_{2n-1} occurs.

Over the rationals the canonical scaling of the chain pairings may require an
irrational factor; ``decompose`` therefore returns exact chain bases with a
``normalized`` flag per block and is a diagnostic.  The authoritative
construction of homotopy inverses is ``homotopy_inverse_solve``, a plain
linear solve for [I, X] = 1 with X odd (and optionally self-adjoint).
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .scalars import is_zero


class NotHomotopyInvertible(ValueError):
    def __init__(self, k):
        self.block = f"2_{k}"
        super().__init__(
            f"a block of type 2_{k} (odd chain pairs) obstructs [I, Itil] = 1")


class Block:
    __slots__ = ("kind", "k", "chains", "pairing", "normalized")

    def __init__(self, kind, k, chains, pairing, normalized):
        self.kind = kind          # "1", "2", or "3"
        self.k = k
        self.chains = chains      # list of chains; each chain is a list of vectors
        self.pairing = pairing    # gram matrix of the concatenated vectors
        self.normalized = normalized

    def vectors(self):
        return [v for ch in self.chains for v in ch]

    def describe(self):
        return {"type": f"{self.kind}_{self.k}" if self.kind != "3" else "3",
                "dim": len(self.vectors()), "normalized": self.normalized}


class BlockDecomposition:
    def __init__(self, blocks, base_change):
        self.blocks = blocks
        self.base_change = base_change  # columns: the chain vectors

    def summary(self):
        return [b.describe() for b in self.blocks]

    def has_odd_pair_block(self):
        return any(b.kind == "2" and b.k % 2 for b in self.blocks)


def _mat_pow(m, k):
    n = len(m)
    out = linalg.identity(n, Fraction(1))
    for _ in range(k):
        out = linalg.mat_mul(out, m)
    return out


def _apply(mat, vec):
    return [linalg.sum_prod(row, vec) for row in mat]


def _gpair(gmat, x, y):
    acc = 0
    for i, xi in enumerate(x):
        if is_zero(xi):
            continue
        for j, yj in enumerate(y):
            if not is_zero(yj):
                acc = acc + xi * gmat[i][j] * yj
    return acc


def _rref(rows):
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = None
        for rr in range(r, len(m)):
            if not is_zero(m[rr][c]):
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for rr in range(len(m)):
            if rr != r and not is_zero(m[rr][c]):
                f = m[rr][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def kernel_basis(mat):
    n = len(mat[0])
    rref, pivots = _rref(mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        basis.append(v)
    return basis


def column_space_basis(mat):
    cols = list(zip(*mat))
    rref, pivots = _rref([list(c) for c in cols])
    return [list(cols[p]) for p in pivots]


def _in_span(basis, vec):
    if not basis:
        return all(is_zero(x) for x in vec)
    rows = [list(col) for col in zip(*basis)]
    sol = linalg.solve_linear(rows, list(vec))
    return sol is not None


def _height(imat, v, cap):
    h = 0
    x = v
    while not all(is_zero(c) for c in x):
        x = _apply(imat, x)
        h += 1
        if h > cap:
            raise ValueError("operator is not nilpotent on the given vector")
    return h


def decompose(parity, gmat, imat):
    """Best-effort canonical decomposition over the rationals."""
    n = len(parity)
    stab = _mat_pow(imat, n)
    nil_basis = kernel_basis(stab)
    inv_basis = column_space_basis(stab)
    blocks = []
    if inv_basis:
        vecs = inv_basis
        gram = [[_gpair(gmat, x, y) for y in vecs] for x in vecs]
        blocks.append(Block("3", 0, [vecs], gram, True))

    remaining = list(nil_basis)
    while remaining:
        cap = len(remaining) + 1
        heights = [(_height(imat, v, n + 1), i) for i, v in enumerate(remaining)]
        h = max(x for x, _ in heights)
        tops = [remaining[i] for hh, i in heights if hh == h]

        def top_pair(a, b):
            x = a
            for _ in range(h - 1):
                x = _apply(imat, x)
            return _gpair(gmat, x, b)

        chosen = None
        for v in tops:
            if not is_zero(top_pair(v, v)):
                chosen = ("1", v, None)
                break
        if chosen is None:
            for v in tops:
                for w in tops:
                    if w is not v and not is_zero(top_pair(v, w)):
                        chosen = ("2", v, w)
                        break
                if chosen:
                    break
        if chosen is None:
            raise ValueError("degenerate pairing on a chain layer")
        kind, v, w = chosen
        chains = [_chain(imat, v, h)]
        if w is not None:
            chains.append(_chain(imat, w, h))
        vecs = [x for ch in chains for x in ch]
        gram = [[_gpair(gmat, x, y) for y in vecs] for x in vecs]
        if linalg.solve_linear(gram, [Fraction(0)] * len(vecs)) is None:
            raise ValueError("split-off block unexpectedly degenerate")
        # g-orthogonal complement of the block inside the remaining space
        new_remaining = []
        for u in remaining:
            uu = _orthogonalize(gmat, u, vecs, gram)
            if not all(is_zero(c) for c in uu):
                if not _in_span(new_remaining, uu):
                    new_remaining.append(uu)
        expected = len(remaining) - len(vecs)
        if len(new_remaining) != expected:
            new_remaining = _prune_to_dim(new_remaining, expected)
        remaining = new_remaining
        normalized = _is_normal_form(gram, kind, h, parity, vecs)
        blocks.append(Block(kind, h if kind == "2" else h // 2,
                            chains, gram, normalized))
    base = [v for b in blocks for v in b.vectors()]
    base_change = [list(col) for col in zip(*base)] if base else []
    return BlockDecomposition(blocks, base_change)


def _chain(imat, v, h):
    out = [v]
    for _ in range(h - 1):
        out.append(_apply(imat, out[-1]))
    return out


def _orthogonalize(gmat, u, vecs, gram):
    rhs = [_gpair(gmat, x, u) for x in vecs]
    coeffs = linalg.solve_linear([[gram[i][j] for j in range(len(vecs))]
                                  for i in range(len(vecs))], rhs)
    if coeffs is None:
        raise ValueError("cannot orthogonalize against a degenerate block")
    out = list(u)
    for c, v in zip(coeffs, vecs):
        if not is_zero(c):
            out = [x - c * y for x, y in zip(out, v)]
    return out


def _prune_to_dim(vectors, dim):
    out = []
    for v in vectors:
        if not _in_span(out, v):
            out.append(v)
        if len(out) == dim:
            break
    return out


def _is_normal_form(gram, kind, h, parity, vecs):
    # canonical pattern: position m pairs with 2k-1-m inside one chain (type
    # 1) or with k-1-m on the partner chain (type 2), coefficients +-1
    size = len(gram)
    half = size // 2
    for i in range(size):
        for j in range(size):
            if kind == "1":
                expect = i + j == size - 1
            else:
                a, b = min(i, j), max(i, j)
                expect = a < half <= b and a + (b - half) == half - 1
            val = gram[i][j]
            if expect:
                if is_zero(val) or abs(val) != 1:
                    return False
            elif not is_zero(val):
                return False
    return True


def homotopy_inverse_blockwise(parity, gmat, imat, dec: BlockDecomposition):
    """Per-block homotopy inverse: on an even-length chain send odd powers of
    I applied to the generator down one step and even powers to zero; on the
    invertible part take half the inverse."""
    n = len(parity)
    zero, one = Fraction(0), Fraction(1)
    half = Fraction(1, 2)
    cols = {}
    new_basis = []
    for b in dec.blocks:
        if b.kind == "2" and b.k % 2:
            raise NotHomotopyInvertible(b.k)
        if b.kind == "3":
            vecs = b.chains[0]
            sub = _operator_in_basis(imat, vecs)
            subinv = linalg.mat_inv(sub)
            for j, v in enumerate(vecs):
                img = [zero] * n
                for i, w in enumerate(vecs):
                    c = half * subinv[i][j]
                    if not is_zero(c):
                        img = [x + c * y for x, y in zip(img, w)]
                cols[len(new_basis) + j] = img
            new_basis.extend(vecs)
            continue
        for ch in b.chains:
            if len(ch) % 2:
                raise NotHomotopyInvertible(len(ch))
            for m, vec in enumerate(ch):
                img = ch[m - 1] if m % 2 else [zero] * n
                cols[len(new_basis) + m] = img
            new_basis.extend(ch)
    # transport to the standard basis
    bmat = [list(col) for col in zip(*new_basis)]
    binv = linalg.mat_inv(bmat)
    timg = [[cols[j][i] for j in range(n)] for i in range(n)]
    return linalg.mat_mul(timg, binv)


def _operator_in_basis(imat, vecs):
    rows = [list(col) for col in zip(*vecs)]
    out = []
    for v in vecs:
        img = _apply(imat, v)
        sol = linalg.solve_linear(rows, img)
        if sol is None:
            raise ValueError("subspace is not invariant")
        out.append(sol)
    return [[out[j][i] for j in range(len(vecs))] for i in range(len(vecs))]


def homotopy_inverse_solve(parity, gmat, imat, self_adjoint=True):
    """Solve [I, X] = 1 with X odd (and self-adjoint unless disabled) over the
    scalar field of the data.  Returns the matrix or None when unsolvable."""
    n = len(parity)
    unknowns = [(i, j) for i in range(n) for j in range(n)
                if (parity[i] + parity[j]) % 2 == 1]
    index = {u: k for k, u in enumerate(unknowns)}
    zero = gmat[0][0] - gmat[0][0]
    one = zero + 1
    rows, rhs = [], []
    # (I X + X I)[i][j] = delta_ij
    for i in range(n):
        for j in range(n):
            row = [zero] * len(unknowns)
            for k in range(n):
                if (k, j) in index:
                    row[index[(k, j)]] = row[index[(k, j)]] + imat[i][k]
                if (i, k) in index:
                    row[index[(i, k)]] = row[index[(i, k)]] + imat[k][j]
            rows.append(row)
            rhs.append(one if i == j else zero)
    if self_adjoint:
        # g(X e_j, e_l) - (-1)^{p_j} g(e_j, X e_l) = 0
        for j in range(n):
            for l in range(n):
                row = [zero] * len(unknowns)
                for k in range(n):
                    if (k, j) in index:
                        row[index[(k, j)]] = row[index[(k, j)]] + gmat[k][l]
                    if (k, l) in index:
                        c = gmat[j][k]
                        if parity[j]:
                            c = -c
                        row[index[(k, l)]] = row[index[(k, l)]] - c
                rows.append(row)
                rhs.append(zero)
    sol = linalg.solve_linear(rows, rhs)
    if sol is None:
        return None
    out = [[zero] * n for _ in range(n)]
    for (i, j), k in index.items():
        out[i][j] = sol[k]
    return out


def quadratic_form_criterion(parity, gmat, imat) -> bool:
    """Nondegeneracy of x -> g(Ix, x) on the odd part of V (the even part of
    the parity-shifted space).  True implies a homotopy inverse exists."""
    odd = [i for i, p in enumerate(parity) if p]
    n = len(parity)
    bmat = []
    for a in odd:
        row = []
        ea = [Fraction(0)] * n
        ea[a] = Fraction(1)
        ia = _apply(imat, ea)
        for b in odd:
            eb = [Fraction(0)] * n
            eb[b] = Fraction(1)
            ib = _apply(imat, eb)
            row.append(_gpair(gmat, ia, eb) + _gpair(gmat, ib, ea))
        bmat.append(row)
    if not bmat:
        return True
    try:
        linalg.mat_inv(bmat)
        return True
    except ValueError:
        return False
