"""Koszul-signed tensor calculus over the parity-shifted module Pi A.

A :class:`GTensor` carries an ordered tuple of slot labels, a variance
('vec' for elements of (Pi A)^{tensor n}, 'cov' for multilinear functionals),
sparse entries keyed by basis index tuples, and the tuple of slot parities
(the Pi A parity of basis index mu is parity_A(mu) + 1).

Sign conventions:

* reordering slots multiplies an entry by (-1) for every transposition of two
  odd entries (same rule for both variances);
* the tensor product of two covectors obeys
  (A (x) B)[i, j] = (-1)^{|B| p(i)} A[i] B[j], where |B| is the total parity
  of the gadget B and p(i) the parity sum of the entries fed to A;
* vectors multiply with no cross sign;
* a full pairing of a vector with a covector over identical slot order is the
  plain sum of entry products.

An odd operator extends to tensor powers by the Leibniz rule with the sign
(-1)^{parity sum of the slots it moves past}.
"""

from __future__ import annotations

from .scalars import is_zero


class GTensor:
    __slots__ = ("slots", "variance", "parities", "parity", "data", "zero")

    def __init__(self, slots, variance, parities, parity, data, zero):
        self.slots = tuple(slots)
        self.variance = variance  # 'vec' | 'cov'
        self.parities = tuple(parities)  # Pi A parity per basis index
        self.parity = parity % 2  # total gadget parity
        self.zero = zero
        self.data = {k: v for k, v in data.items() if not is_zero(v)}

    @property
    def dim(self):
        return len(self.parities)

    def entry_parity(self, key):
        return sum(self.parities[i] for i in key) % 2

    def reorder(self, new_slots):
        """Present the same tensor on a permuted slot tuple."""
        if tuple(new_slots) == self.slots:
            return self
        pos = {s: i for i, s in enumerate(self.slots)}
        perm = [pos[s] for s in new_slots]  # new position k holds old slot perm[k]
        data = {}
        for key, val in self.data.items():
            new_key = tuple(key[p] for p in perm)
            s = _reorder_sign(perm, [self.parities[i] for i in key])
            data[new_key] = (val if s > 0 else -val)
        return GTensor(new_slots, self.variance, self.parities, self.parity,
                       data, self.zero)

    def tensor(self, other: "GTensor") -> "GTensor":
        if self.variance != other.variance:
            raise ValueError("tensor product requires equal variance")
        if self.parities != other.parities:
            raise ValueError("tensor factors over different modules")
        data = {}
        for k1, v1 in self.data.items():
            p1 = self.entry_parity(k1)
            for k2, v2 in other.data.items():
                v = v1 * v2
                if self.variance == "cov" and other.parity and p1:
                    v = -v
                data[k1 + k2] = v
        return GTensor(self.slots + other.slots, self.variance, self.parities,
                       self.parity + other.parity, data, self.zero)

    def pair(self, cov: "GTensor"):
        """Full contraction <vec, cov> with slots matched by label."""
        if self.variance != "vec" or cov.variance != "cov":
            raise ValueError("pair() wants a vector and a covector")
        if set(self.slots) != set(cov.slots):
            raise ValueError("slot sets differ")
        other = cov.reorder(self.slots)
        acc = self.zero
        for key, val in self.data.items():
            w = other.data.get(key)
            if w is not None:
                acc = acc + val * w
        return acc

    def apply_leibniz(self, opmat, op_parity=1):
        """Extend an operator on A to this tensor by the Leibniz rule."""
        data = {}
        for key, val in self.data.items():
            pref = 0
            for pos, mu in enumerate(key):
                sgn = -1 if (op_parity * pref) % 2 else 1
                for target in range(self.dim):
                    c = opmat[target][mu]
                    if is_zero(c):
                        continue
                    nk = key[:pos] + (target,) + key[pos + 1:]
                    add = c * val
                    if sgn < 0:
                        add = -add
                    data[nk] = data.get(nk, self.zero) + add
                pref += self.parities[mu]
        return GTensor(self.slots, self.variance, self.parities,
                       (self.parity + op_parity) % 2, data, self.zero)

    def apply_dual_leibniz(self, opmat, op_parity=1):
        """The dual action on covectors: (F*a)[k] = sum over slot positions of
        the Leibniz-signed pullback, so that <F t, a> = <t, F* a> for all t."""
        if self.variance != "cov":
            raise ValueError("dual action is for covectors")
        out = {}
        keys = set()
        for key in self.data:
            for pos in range(len(self.slots)):
                for mu in range(self.dim):
                    if not is_zero(opmat[key[pos]][mu]):
                        keys.add(key[:pos] + (mu,) + key[pos + 1:])
        for key in keys:
            acc = self.zero
            pref = 0
            for pos, mu in enumerate(key):
                for target in range(self.dim):
                    c = opmat[target][mu]
                    if is_zero(c):
                        continue
                    src = key[:pos] + (target,) + key[pos + 1:]
                    a = self.data.get(src)
                    if a is None:
                        continue
                    term = c * a
                    if (op_parity * pref) % 2:
                        term = -term
                    acc = acc + term
                pref += self.parities[mu]
            if not is_zero(acc):
                keys_out = key
                out[keys_out] = acc
        return GTensor(self.slots, self.variance, self.parities,
                       (self.parity + op_parity) % 2, out, self.zero)

    def __eq__(self, other):
        if not isinstance(other, GTensor):
            return NotImplemented
        if self.slots != other.slots or self.variance != other.variance:
            return False
        keys = set(self.data) | set(other.data)
        from .scalars import scalar_equal
        for k in keys:
            a = self.data.get(k, self.zero)
            b = other.data.get(k, self.zero)
            if not scalar_equal(a, b):
                return False
        return True

    def __hash__(self):
        raise TypeError("GTensor is not hashable")

    def scaled(self, c):
        return GTensor(self.slots, self.variance, self.parities, self.parity,
                       {k: c * v for k, v in self.data.items()}, self.zero)

    def __repr__(self):
        ent = ", ".join(f"{k}: {v}" for k, v in sorted(self.data.items()))
        return f"GTensor({self.variance}, slots={self.slots}, {{{ent}}})"


def _reorder_sign(perm, parities):
    """Koszul sign of permuting entries: new position k holds old item perm[k]."""
    sign = 1
    n = len(perm)
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b] and parities[perm[a]] and parities[perm[b]]:
                sign = -sign
    return sign


def perm_parity(perm) -> int:
    """Parity (0/1) of a permutation given as an image list."""
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        parity ^= (ln - 1) % 2
    return parity


def koszul_contract(t: GTensor, u: GTensor, pairs):
    """Contract slots of t against slots of u (dual variance required).

    ``pairs`` is a list of (slot-of-t, slot-of-u).  The result lives on t's
    unpaired slots followed by u's, with variance inherited slotwise (the
    unpaired slots keep their own variance; mixing is allowed only when one
    side is fully consumed).  Signs: t's paired slots are moved to its end, u's
    paired slots to its front (Koszul reorder), then the adjacent evaluation
    contributes (-1)^{p(k)} per contracted index k when the vector stands left
    of the covector, and +1 when the covector stands left.
    """
    if t.parities != u.parities:
        raise ValueError("contracting tensors over different modules")
    t_paired = [a for a, _ in pairs]
    u_paired = [b for _, b in pairs]
    for a, b in pairs:
        if a not in t.slots or b not in u.slots:
            raise ValueError("pairing references missing slots")
    if t.variance == u.variance:
        raise ValueError("paired slots must have dual variance")
    t_rest = [s for s in t.slots if s not in t_paired]
    u_rest = [s for s in u.slots if s not in u_paired]
    tt = t.reorder(t_rest + t_paired)
    uu = u.reorder(u_paired + u_rest)
    k = len(pairs)
    acc = {}
    vec_left = t.variance == "vec"
    for kt, vt in tt.data.items():
        head, mid = kt[:len(t_rest)], kt[len(t_rest):]
        for ku, vu in uu.data.items():
            if ku[:k] != mid:
                continue
            v = vt * vu
            if vec_left:
                # vector left of covector: each contracted index k gives
                # (-1)^{p(k)}, and the whole covector gadget crosses the
                # unpaired head entries of t.
                if sum(tt.parities[i] for i in mid) % 2:
                    v = -v
                if u.parity and sum(tt.parities[i] for i in head) % 2:
                    v = -v
            key = head + ku[k:]
            acc[key] = acc.get(key, t.zero) + v
    variance = t.variance if t_rest else u.variance
    if t_rest and u_rest and t.variance != u.variance:
        variance = "mixed"
    return GTensor(tuple(t_rest + u_rest), variance, t.parities,
                   t.parity + u.parity, acc, t.zero)


def delta_tensor(parities, slots, zero, variance="cov"):
    """Identity pairing on two slots: entries delta_{mu nu}."""
    one = zero + 1
    data = {(m, m): one for m in range(len(parities))}
    return GTensor(slots, variance, parities, 0, data, zero)


def from_matrix(mat, parities, slots, zero, variance="vec", parity=0):
    data = {}
    for mu in range(len(parities)):
        for nu in range(len(parities)):
            if not is_zero(mat[mu][nu]):
                data[(mu, nu)] = mat[mu][nu]
    return GTensor(slots, variance, parities, parity, data, zero)
