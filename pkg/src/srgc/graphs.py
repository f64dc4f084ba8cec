"""Ribbon and stable ribbon graphs with oriented generators.

A stable ribbon graph is (flags 0..F-1, sigma, eta, vertex partition, genus
labels, flagless-cycle counts).  sigma is a permutation stabilizing the
partition; its orbits inside a vertex are the boundary cycles of that vertex;
eta is the fixed-point-free involution pairing flags into edges.  Ordinary
ribbon graphs are the special case of one cycle per vertex, genus zero and no
flagless cycles.

``empties[v]`` counts boundary cycles of v that carry no flags.  These are
not part of the classical definition but arise when an edge contraction
merges two one-flag cycles; they count toward the stability bound, each one
is a face, and the complex is closed under contraction once they are allowed.

Orientations are handled through *words*: a word is an ordering of the basis
of the orientation space -- all flags plus one marker per boundary cycle
(including flagless ones).  Two words for the same graph differ by a
permutation; the orientation sign is its parity.  A cycle of length r
occupies a block of r+1 symbols (flags then marker), so swapping blocks of
odd cycles is even, matching the classical description by a chosen flag per
even cycle plus an order on even cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations


@dataclass(frozen=True)
class StableGraph:
    sigma: tuple
    eta: tuple
    vertex_of: tuple
    nv: int
    gamma: tuple
    empties: tuple

    @property
    def nflags(self):
        return len(self.sigma)

    def edge_list(self):
        return [(f, self.eta[f]) for f in range(self.nflags) if f < self.eta[f]]

    def vertex_flags(self, v):
        return [f for f in range(self.nflags) if self.vertex_of[f] == v]

    def cycles_at(self, v):
        """sigma-orbits at v, each rotated to start at its minimal flag."""
        try:
            return self._cycle_cache[v]
        except AttributeError:
            pass
        cache = []
        for w in range(self.nv):
            out = []
            seen = set()
            for f in sorted(self.vertex_flags(w)):
                if f in seen:
                    continue
                cyc = [f]
                seen.add(f)
                x = self.sigma[f]
                while x != f:
                    cyc.append(x)
                    seen.add(x)
                    x = self.sigma[x]
                out.append(tuple(cyc))
            cache.append(out)
        object.__setattr__(self, "_cycle_cache", cache)
        return cache[v]

    def all_cycles(self):
        return [(v, c) for v in range(self.nv) for c in self.cycles_at(v)]

    def b_of(self, v):
        return len(self.cycles_at(v)) + self.empties[v]


def ordinary_graph(sigma_cycles, eta_pairs):
    """Ordinary ribbon graph from vertex cycles and edge pairs."""
    nf = sum(len(c) for c in sigma_cycles)
    sigma = [0] * nf
    vertex_of = [0] * nf
    for v, cyc in enumerate(sigma_cycles):
        for i, f in enumerate(cyc):
            sigma[f] = cyc[(i + 1) % len(cyc)]
            vertex_of[f] = v
    eta = [0] * nf
    for a, b in eta_pairs:
        eta[a], eta[b] = b, a
    nv = len(sigma_cycles)
    return StableGraph(tuple(sigma), tuple(eta), tuple(vertex_of), nv,
                       (0,) * nv, (0,) * nv)


def stable_graph(vertex_cycles, eta_pairs, gamma=None, empties=None):
    """Stable graph from per-vertex lists of cycles."""
    nf = sum(len(c) for cycs in vertex_cycles for c in cycs)
    sigma = [0] * nf
    vertex_of = [0] * nf
    for v, cycs in enumerate(vertex_cycles):
        for cyc in cycs:
            for i, f in enumerate(cyc):
                sigma[f] = cyc[(i + 1) % len(cyc)]
                vertex_of[f] = v
    eta = [0] * nf
    for a, b in eta_pairs:
        eta[a], eta[b] = b, a
    nv = len(vertex_cycles)
    gamma = tuple(gamma) if gamma else (0,) * nv
    empties = tuple(empties) if empties else (0,) * nv
    return StableGraph(tuple(sigma), tuple(eta), tuple(vertex_of), nv, gamma, empties)


# ---------------------------------------------------------------------------
# validation / topology

def validate(g: StableGraph, ordinary=False) -> dict:
    nf = g.nflags
    ok_inv = all(g.eta[g.eta[f]] == f and g.eta[f] != f for f in range(nf))
    ok_perm = sorted(g.sigma) == list(range(nf))
    ok_part = all(g.vertex_of[g.sigma[f]] == g.vertex_of[f] for f in range(nf))
    ok_stab = True
    ok_ord = True
    for v in range(g.nv):
        n = len(g.vertex_flags(v))
        b = g.b_of(v)
        if b == 0:
            ok_stab = False
            continue
        if 2 * (2 * g.gamma[v] + b - 2) + n <= 0:
            ok_stab = False
        if ordinary and (g.gamma[v] or g.empties[v] or len(g.cycles_at(v)) != 1 or n < 3):
            ok_ord = False
    rep = {
        "involution": ok_inv,
        "permutation": ok_perm,
        "partition_stable": ok_part,
        "stability": ok_stab,
    }
    if ordinary:
        rep["ordinary"] = ok_ord
    return rep


def is_valid(g: StableGraph, ordinary=False) -> bool:
    return all(validate(g, ordinary).values())


def flag_faces(g: StableGraph):
    """Orbits of sigma o eta, each rotated to start at its minimal flag."""
    nf = g.nflags
    out = []
    seen = set()
    for f in range(nf):
        if f in seen:
            continue
        orbit = [f]
        seen.add(f)
        x = g.sigma[g.eta[f]]
        while x != f:
            orbit.append(x)
            seen.add(x)
            x = g.sigma[g.eta[x]]
        out.append(tuple(orbit))
    return out


def faces(g: StableGraph):
    """All faces: flag orbits plus one ('empty', v, i) face per flagless cycle."""
    out = list(flag_faces(g))
    for v in range(g.nv):
        for i in range(g.empties[v]):
            out.append(("empty", v, i))
    return out


def is_connected(g: StableGraph) -> bool:
    if g.nv == 0:
        return False
    parent = list(range(g.nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for f in range(g.nflags):
        union(g.vertex_of[f], g.vertex_of[g.eta[f]])
    return len({find(v) for v in range(g.nv)}) == 1


def surface_type(g: StableGraph):
    """(genus, punctures) of the associated nodal surface.

    Split every vertex into its boundary cycles to get an ordinary (possibly
    disconnected) ribbon graph; compute per-component genus from the Euler
    characteristic; then re-identify the cycles of each vertex, through a
    genus-gamma_v component when 2*gamma_v + b_v - 2 > 0 and directly
    otherwise.  Arithmetic genus of the nodal union: sum of component genera
    plus nodes minus components plus one.
    """
    if not is_connected(g):
        raise ValueError("surface_type needs a connected graph")
    cycles = []
    cyc_of_flag = {}
    for v in range(g.nv):
        for c in g.cycles_at(v):
            cid = len(cycles)
            cycles.append((v, c))
            for f in c:
                cyc_of_flag[f] = cid
        for i in range(g.empties[v]):
            cycles.append((v, ("empty", i)))
    ncyc = len(cycles)
    parent = list(range(ncyc))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for f in range(g.nflags):
        union(cyc_of_flag[f], cyc_of_flag[g.eta[f]])
    comp_v = {}
    comp_e = {}
    comp_f = {}
    for cid in range(ncyc):
        comp_v[find(cid)] = comp_v.get(find(cid), 0) + 1
    for f, fp in g.edge_list():
        c = find(cyc_of_flag[f])
        comp_e[c] = comp_e.get(c, 0) + 1
    for face in faces(g):
        if isinstance(face[0], str):
            _, v, i = face
            # locate the empty cycle's split vertex
            for cid, (vv, cc) in enumerate(cycles):
                if vv == v and cc == ("empty", i):
                    comp_f[find(cid)] = comp_f.get(find(cid), 0) + 1
                    break
        else:
            c = find(cyc_of_flag[face[0]])
            comp_f[c] = comp_f.get(c, 0) + 1
    genus_sum = 0
    ncomp = 0
    for root, nv_ in comp_v.items():
        ncomp += 1
        ne = comp_e.get(root, 0)
        nfa = comp_f.get(root, 0)
        chi = nv_ - ne
        gg2 = 2 - nfa - chi
        if gg2 < 0 or gg2 % 2:
            raise ValueError("inconsistent split-component Euler characteristic")
        genus_sum += gg2 // 2
    nodes = 0
    for v in range(g.nv):
        b = g.b_of(v)
        if 2 * g.gamma[v] + b - 2 > 0:
            nodes += b
            ncomp += 1
            genus_sum += g.gamma[v]
        elif b == 2:
            nodes += 1
    genus = genus_sum + nodes - ncomp + 1
    return genus, len(faces(g))


# ---------------------------------------------------------------------------
# orientation words

def marker(cycle):
    return ("m", min(cycle))


def empty_marker(v, i):
    return ("me", v, i)


def block(cycle, start):
    i = cycle.index(start)
    return list(cycle[i:] + cycle[:i]) + [marker(cycle)]


def eval_word(g: StableGraph):
    """Word of the presentation the value engine uses: vertices in id order,
    flagless-cycle markers first, then cycles by minimal flag, min starts."""
    w = []
    for v in range(g.nv):
        for i in range(g.empties[v]):
            w.append(empty_marker(v, i))
        for c in g.cycles_at(v):
            w.extend(block(c, min(c)))
    return tuple(w)


def canonical_or_word(g: StableGraph):
    """Odd-cycle blocks first (their placement is sign-free), then even-length
    blocks and flagless markers in a fixed order."""
    odd, even = [], []
    for v in range(g.nv):
        for c in g.cycles_at(v):
            (odd if len(c) % 2 else even).append((v, 0, min(c), c))
        for i in range(g.empties[v]):
            even.append((v, 1, i, None))
    w = []
    for v, _, _, c in sorted(odd, key=lambda t: (t[0], t[2])):
        w.extend(block(c, min(c)))
    for v, kind, key, c in sorted(even, key=lambda t: (t[0], t[1], t[2])):
        if kind == 0:
            w.extend(block(c, min(c)))
        else:
            w.append(empty_marker(v, key))
    return tuple(w)


def word_sign(w1, w2) -> int:
    """Sign of the permutation taking word w1 to word w2."""
    if len(w1) != len(w2):
        raise ValueError("words of different length")
    pos = {s: i for i, s in enumerate(w1)}
    if len(pos) != len(w1) or set(w2) != set(pos):
        raise ValueError("words are not orderings of the same symbols")
    perm = [pos[s] for s in w2]
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        if ln % 2 == 0:
            sign = -sign
    return sign


def orientation_sign(w1, w2, g=None) -> int:
    return word_sign(w1, w2)


# ---------------------------------------------------------------------------
# edge contraction

def _run(g, start, stop):
    """Flags sigma(start), sigma^2(start), ... up to (excluding) stop."""
    out = []
    x = g.sigma[start]
    while x != stop:
        out.append(x)
        x = g.sigma[x]
    return out


def contract_edge(g: StableGraph, edge, word):
    """Contract an edge; returns (graph, word, sign) or None for the excluded
    neighbor loops.  ``edge`` is a flag pair or an index into edge_list().

    Orientation transport: the parent word is rearranged (with its permutation
    sign) so that the symbols killed by the contraction stand first --
    ``f1, marker(c1), f2`` when two cycles merge, ``f1, f2`` when one cycle
    splits -- followed by the surviving symbols arranged exactly as the child
    word will read them; stripping the leading group then defines the induced
    orientation.  Extracting to the front makes consecutive contractions
    anticommute (interior-product behaviour), which is what d^2 = 0 requires.
    """
    if isinstance(edge, int):
        edge = g.edge_list()[edge]
    f1, f2 = edge
    if g.eta[f1] != f2:
        raise ValueError("not an edge")
    if f1 > f2:
        f1, f2 = f2, f1
    v1, v2 = g.vertex_of[f1], g.vertex_of[f2]
    # A contraction whose result would lose a face does not contribute: the
    # face between neighboring loop flags (sigma(f1) = f2 or sigma(f2) = f1)
    # and the two-flag face of an edge joining two one-flag cycles both have
    # perimeter supported on this edge alone, so the corresponding cell has no
    # such boundary face.  Both cases are Empty.
    if g.sigma[f1] == f2 or g.sigma[f2] == f1:
        return None
    if g.sigma[f1] == f1 and g.sigma[f2] == f2:
        return None
    cyc1 = next(c for c in g.cycles_at(v1) if f1 in c)
    cyc2 = next(c for c in g.cycles_at(v2) if f2 in c)
    same_cycle = v1 == v2 and f2 in cyc1

    if same_cycle:
        case = "split"
    elif v1 == v2:
        case = "join"
    else:
        case = "merge"

    # --- graph surgery -----------------------------------------------------
    old_order = [v for v in range(g.nv) if not (case == "merge" and v == v2)]
    vmap = {v: i for i, v in enumerate(old_order)}
    if case == "merge":
        vmap[v2] = vmap[v1]
    target = vmap[v1]

    X = _run(g, f1, f2 if case == "split" else f1)
    Y = _run(g, f2, f1 if case == "split" else f2)

    new_cycles = [[] for _ in old_order]
    new_gamma = [0] * len(old_order)
    new_empties = [0] * len(old_order)
    empty_base = {}
    for v in range(g.nv):
        nvtx = vmap[v]
        new_gamma[nvtx] += g.gamma[v]
        empty_base[v] = new_empties[nvtx]
        new_empties[nvtx] += g.empties[v]
        for c in g.cycles_at(v):
            if v in (v1, v2) and c in (cyc1, cyc2):
                continue
            new_cycles[nvtx].append(c)
    if case == "join":
        new_gamma[target] += 1
    if case == "split":
        new_cycles[target].append(tuple(Y))
        new_cycles[target].append(tuple(X))
    else:
        # X + Y is nonempty: the two-one-flag-cycle case was dropped above
        new_cycles[target].append(tuple(X + Y))

    # --- orientation transport via elementary front operations --------------
    # Deleting a symbol at position p contributes (-1)^p (extract to front,
    # strip); a freshly created marker is inserted at the front.  Transports
    # of disjoint contractions then anticommute, which gives d^2 = 0.
    w = list(word)
    sign = 1
    if case == "split":
        # stripping (f2, f1) rather than (f1, f2) matches the sign with which
        # the dual-pairing insertion reproduces the split vertex's functional
        killed = (f2, f1)
    else:
        killed = (f1, marker(cyc1), f2)
    for s in killed:
        p = w.index(s)
        if p % 2:
            sign = -sign
        w.pop(p)
    if case == "split":
        w.insert(0, ("new",))

    # --- relabel flags and finalize ----------------------------------------
    survivors = [f for f in range(g.nflags) if f not in (f1, f2)]
    relab = {f: i for i, f in enumerate(survivors)}
    vcycles = [[tuple(relab[f] for f in c) for c in cycs] for cycs in new_cycles]
    eta_pairs = [(relab[a], relab[b]) for a, b in g.edge_list() if (a, b) != (f1, f2)]
    chd = stable_graph(vcycles, eta_pairs, new_gamma, new_empties)

    # markers are named by the minimal flag of their cycle; the survivor of a
    # merge and the two markers of a split are retagged accordingly
    retag = {}
    if case == "split":
        retag[("new",)] = ("m", min(relab[f] for f in X))
        retag[marker(cyc1)] = ("m", min(relab[f] for f in Y))
    else:
        retag[marker(cyc2)] = ("m", min(relab[f] for f in X + Y))
    out_word = []
    for s in w:
        if isinstance(s, int):
            out_word.append(relab[s])
        elif s in retag:
            out_word.append(retag[s])
        elif s[0] == "m":
            out_word.append(("m", relab[s[1]]))
        else:
            out_word.append(("me", vmap[s[1]], empty_base[s[1]] + s[2]))
    return chd, tuple(out_word), sign


# ---------------------------------------------------------------------------
# canonical forms and automorphisms

def _vertex_invariant(g, v):
    return (g.gamma[v], g.empties[v],
            tuple(sorted(len(c) for c in g.cycles_at(v))))


def canonical_form(g: StableGraph):
    """Canonical relabeling by backtracking.

    Vertices are processed in nondecreasing invariant order, cycles within a
    vertex in nondecreasing length; new flag labels are assigned consecutively
    following each cycle from a chosen start.  The eta trace (partner's new
    label when already assigned, else a sentinel) is minimized
    lexicographically.  Returns (canonical graph, labelings) where labelings
    are all old->new flag maps achieving the minimum.
    """
    nf = g.nflags
    invs = [_vertex_invariant(g, v) for v in range(g.nv)]
    order_template = sorted(invs)
    sentinel = nf + 1
    eta = g.eta
    sigma = g.sigma
    best_trace = []
    best_labelings = []
    state = {"have_best": False}
    trace = []
    labels = {}

    cycles_by_vertex = [sorted(g.cycles_at(v), key=len) for v in range(g.nv)]

    def rec_vertex(pos, used, mode):
        # mode 0: trace so far equals the incumbent's prefix (keep comparing);
        # mode 1: strictly below the incumbent (or no incumbent yet)
        if pos == g.nv:
            if not state["have_best"]:
                state["have_best"] = True
                best_trace[:] = trace
                best_labelings.append(dict(labels))
            elif mode == 1:
                best_trace[:] = trace
                best_labelings[:] = [dict(labels)]
            else:
                best_labelings.append(dict(labels))
            return
        target = order_template[pos]
        for v in range(g.nv):
            if v in used or invs[v] != target:
                continue
            used.add(v)
            rec_cycles(pos, v, cycles_by_vertex[v], used, mode)
            used.remove(v)
            if state["have_best"]:
                # after any completed subtree the incumbent extends the
                # current prefix, so the remaining siblings compare again
                mode = 0

    def rec_cycles(pos, v, remaining, used, mode):
        if not remaining:
            rec_vertex(pos + 1, used, mode)
            return
        ln = len(remaining[0])
        group = [c for c in remaining if len(c) == ln]
        rest = [c for c in remaining if len(c) != ln]
        nxt = len(labels)
        tbase = len(trace)
        compare = state["have_best"]
        for ci, c in enumerate(group):
            others = group[:ci] + group[ci + 1:]
            for si in range(ln):
                x = c[si]
                sub_mode = mode
                ok = True
                assigned = 0
                for k in range(ln):
                    lab = nxt + k
                    labels[x] = lab
                    assigned += 1
                    p = eta[x]
                    pl = labels.get(p, sentinel)
                    entry = pl if pl < lab else sentinel
                    if sub_mode == 0 and compare:
                        ref = best_trace[tbase + k]
                        if entry > ref:
                            ok = False
                            break
                        if entry < ref:
                            sub_mode = 1
                    trace.append(entry)
                    x = sigma[x]
                if ok:
                    rec_cycles(pos, v, others + rest, used, sub_mode)
                    compare = state["have_best"]
                    if compare:
                        mode = 0
                del trace[tbase:]
                for kk in range(assigned):
                    del labels[c[(si + kk) % ln]]
        return

    rec_vertex(0, set(), 1)

    labelings = best_labelings
    lab0 = labelings[0] if labelings else {}
    used_order = _vertex_order_of_labeling(g, lab0)
    vcycles = []
    gammas = []
    empt = []
    for v in used_order:
        vcycles.append([tuple(lab0[f] for f in c) for c in g.cycles_at(v)])
        gammas.append(g.gamma[v])
        empt.append(g.empties[v])
    eta_pairs = [(lab0[a], lab0[b]) for a, b in g.edge_list()]
    canon = stable_graph(vcycles, eta_pairs, gammas, empt)
    return canon, labelings


def _vertex_order_of_labeling(g, labels):
    firsts = {}
    for f, lab in labels.items():
        v = g.vertex_of[f]
        firsts[v] = min(firsts.get(v, 10 ** 9), lab)
    order = sorted(firsts, key=lambda v: firsts[v])
    # flagless vertices keep their relative order at the end
    order += [v for v in range(g.nv) if v not in firsts]
    return order


def relabel_word(g, word, labels, vmap=None):
    """Transport an orientation word through an old->new flag relabeling."""
    if vmap is None:
        vmap = {}
        order = _vertex_order_of_labeling(g, labels)
        for i, v in enumerate(order):
            vmap[v] = i
    # markers: recompute as min of the image cycle
    cyc_min = {}
    for v in range(g.nv):
        for c in g.cycles_at(v):
            m = min(labels[f] for f in c)
            cyc_min[min(c)] = m
    out = []
    for s in word:
        if isinstance(s, int):
            out.append(labels[s])
        elif s[0] == "m":
            out.append(("m", cyc_min[s[1]]))
        else:
            out.append(("me", vmap[s[1]], s[2]))
    return tuple(out)


class IsoClass:
    """Canonical form with automorphism data and orientation transport."""

    __slots__ = ("graph", "aut_order", "orientation_reversing", "key", "_lab0")

    def __init__(self, g: StableGraph):
        canon, labelings = canonical_form(g)
        self.graph = canon
        self.aut_order = len(labelings)
        self._lab0 = labelings[0]
        rev = any(k >= 2 for k in canon.empties)
        if not rev and len(labelings) > 1:
            lab0 = labelings[0]
            inv0 = {lab: f for f, lab in lab0.items()}
            for lab in labelings[1:]:
                if _auto_orientation_parity(g, {f: inv0[lab[f]] for f in lab}):
                    rev = True
                    break
        self.orientation_reversing = rev
        self.key = encode_graph(canon)

    def transport_sign(self, g, word):
        """Sign relating (g, word) to the canonical orientation word."""
        return word_sign(relabel_word(g, word, self._lab0),
                         canonical_or_word(self.graph))


def _auto_orientation_parity(g: StableGraph, phi) -> int:
    """Parity (1 = reversing) of an automorphism on the orientation space:
    the sign of phi as a permutation of all flags and all cycle markers."""
    parity = _perm_parity_map(phi)
    cyc_map = {}
    for v in range(g.nv):
        for c in g.cycles_at(v):
            cyc_map[min(c)] = min(phi[f] for f in c)
    parity ^= _perm_parity_map(cyc_map)
    return parity


def _perm_parity_map(m) -> int:
    seen = set()
    parity = 0
    for start in m:
        if start in seen:
            continue
        ln = 0
        x = start
        while x not in seen:
            seen.add(x)
            x = m[x]
            ln += 1
        parity ^= (ln - 1) % 2
    return parity


def encode_graph(g: StableGraph):
    parts = [g.nv, g.nflags]
    for v in range(g.nv):
        parts.append((g.gamma[v], g.empties[v],
                      tuple(tuple(c) for c in g.cycles_at(v))))
    parts.append(tuple(g.eta))
    return tuple(parts)


def automorphisms(g: StableGraph):
    """All flag bijections commuting with sigma and eta and preserving the
    vertex partition, genus labels and flagless-cycle counts."""
    _, labelings = canonical_form(g)
    lab0 = labelings[0]
    inv0 = {v: k for k, v in lab0.items()}
    autos = []
    for lab in labelings:
        autos.append({f: inv0[lab[f]] for f in lab})
    return autos


# ---------------------------------------------------------------------------
# the differential

def boundary_set(g: StableGraph, word, ordinary=False):
    """Signed canonical classes of all one-edge contractions.

    Returns a dict key -> (IsoClass, coefficient).  Contributions to classes
    with orientation-reversing automorphisms are dropped; coefficients that
    cancel are removed.
    """
    out = {}
    for e in g.edge_list():
        if ordinary and g.vertex_of[e[0]] == g.vertex_of[e[1]]:
            continue  # loops are not contracted in the ordinary complex
        res = contract_edge(g, e, word)
        if res is None:
            continue
        child, cword, sign = res
        cls = IsoClass(child)
        if cls.orientation_reversing:
            continue
        total = sign * cls.transport_sign(child, cword)
        if cls.key in out:
            prev_cls, coeff = out[cls.key]
            out[cls.key] = (prev_cls, coeff + total)
        else:
            out[cls.key] = (cls, total)
    return {k: v for k, v in out.items() if v[1] != 0}


def d_squared_is_zero(g: StableGraph, word) -> bool:
    first = boundary_set(g, word)
    acc = {}
    for key, (cls, coeff) in first.items():
        second = boundary_set(cls.graph, canonical_or_word(cls.graph))
        for k2, (cls2, c2) in second.items():
            acc[k2] = acc.get(k2, 0) + coeff * c2
    return all(c == 0 for c in acc.values())


# ---------------------------------------------------------------------------
# enumeration

def _partitions(n, max_part=None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - p, p):
            yield (p,) + rest


def _cycle_blueprints(m, odd_only, ordinary, trivalent):
    """Cycle-length multisets for a vertex with m flags."""
    for part in _partitions(m):
        if odd_only and any(x % 2 == 0 for x in part):
            continue
        if (ordinary or trivalent) and len(part) != 1:
            continue
        if trivalent and part[0] != 3:
            continue
        yield part


def _vertex_structures(total, odd_only, ordinary, trivalent):
    """Multisets of cycle-length multisets covering ``total`` flags."""

    def rec(remaining, max_bp):
        if remaining == 0:
            yield ()
            return
        for m in range(remaining, 0, -1):
            for bp in _cycle_blueprints(m, odd_only, ordinary, trivalent):
                if max_bp is not None and (m, bp) > max_bp:
                    continue
                for rest in rec(remaining - m, (m, bp)):
                    yield ((m, bp),) + rest

    yield from rec(total, None)


def _matchings(items):
    if not items:
        yield ()
        return
    a = items[0]
    for i in range(1, len(items)):
        b = items[i]
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield ((a, b),) + m


def enumerate_stable(n_edges, gamma_max=0, *, odd_only=False, ordinary=False,
                     trivalent=False, connected=True, type_filter=None,
                     stable_only=True):
    """All isomorphism classes of stable ribbon graphs with the given number
    of edges (no flagless cycles in generators).  Returns a list of IsoClass.

    Bases (sigma, eta, partition) are deduplicated first; genus labels up to
    ``gamma_max`` are then distributed over each base class.
    """
    F = 2 * n_edges
    bases = {}
    for structure in _vertex_structures(F, odd_only, ordinary, trivalent):
        vcycles = []
        nxt = 0
        for m, bp in structure:
            cycs = []
            for ln in bp:
                cycs.append(tuple(range(nxt, nxt + ln)))
                nxt += ln
            vcycles.append(cycs)
        for eta in _matchings(tuple(range(F))):
            g0 = stable_graph(vcycles, eta)
            if connected and not is_connected(g0):
                continue
            cls = IsoClass(g0)
            if cls.key not in bases:
                bases[cls.key] = cls

    plain = ordinary or trivalent
    seen = {}
    for key in sorted(bases):
        base = bases[key].graph
        for gam in _gamma_options(base.nv, gamma_max, plain):
            g = StableGraph(base.sigma, base.eta, base.vertex_of, base.nv,
                            gam, (0,) * base.nv)
            if stable_only and not validate(g, plain)["stability"]:
                continue
            if plain and not is_valid(g, True):
                continue
            if type_filter is not None and surface_type(g) != tuple(type_filter):
                continue
            cls = IsoClass(g) if any(gam) else bases[key]
            if cls.key not in seen:
                seen[cls.key] = cls
    return [seen[k] for k in sorted(seen)]


def _gamma_options(nv, gamma_max, plain):
    if plain or gamma_max == 0:
        return [(0,) * nv]
    opts = []

    def rec(i, cur):
        if i == nv:
            opts.append(tuple(cur))
            return
        for gma in range(gamma_max + 1):
            rec(i + 1, cur + [gma])

    rec(0, [])
    return opts
