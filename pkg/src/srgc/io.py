"""JSON serialization for algebras, graphs, orientations and scalars."""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .graded import GradedAlgebra
from .graphs import (StableGraph, block, canonical_or_word, empty_marker,
                     marker, stable_graph, word_sign)
from .scalars import (DualNumber, LinearForm, Poly, RationalFunction,
                      fmt_rational, parse_rational)


def scalar_to_json(x):
    if isinstance(x, (int, Fraction)):
        return fmt_rational(x)
    if isinstance(x, RationalFunction):
        return {
            "num": [[fmt_rational(c), list(e)] for e, c in sorted(x.num.terms.items())],
            "den": [[list(f.indices), m] for f, m in x.den],
        }
    if isinstance(x, DualNumber):
        return {"re": scalar_to_json(x.re), "eps": scalar_to_json(x.eps)}
    raise TypeError(f"cannot serialize scalar {x!r}")


def scalar_from_json(obj, nvars=None):
    if isinstance(obj, str):
        return parse_rational(obj)
    if "re" in obj:
        return DualNumber(scalar_from_json(obj["re"], nvars),
                          scalar_from_json(obj["eps"], nvars))
    terms = {tuple(e): parse_rational(c) for c, e in obj["num"]}
    nv = nvars
    if nv is None:
        nv = len(obj["num"][0][1]) if obj["num"] else 0
    num = Poly(nv, terms)
    den = tuple((LinearForm(tuple(ix)), m) for ix, m in obj["den"])
    return RationalFunction(nv, num, den)


def algebra_to_json(alg: GradedAlgebra):
    mult = []
    for (i, j), entry in sorted(alg.mult.items()):
        for k in sorted(entry):
            mult.append([i, j, k, scalar_to_json(entry[k])])
    gm = []
    for i in range(alg.dim):
        for j in range(alg.dim):
            x = alg.gmat[i][j]
            if not (isinstance(x, (int, Fraction)) and x == 0):
                gm.append([i, j, scalar_to_json(x)])
    return {
        "basis": [{"name": n, "parity": p} for n, p in zip(alg.names, alg.parity)],
        "mult": mult,
        "g": gm,
    }


def algebra_from_json(obj) -> GradedAlgebra:
    names = [b["name"] for b in obj["basis"]]
    parity = [int(b["parity"]) for b in obj["basis"]]
    mult = {}
    for i, j, k, c in obj["mult"]:
        mult.setdefault((i, j), {})[k] = scalar_from_json(c)
    d = len(names)
    gmat = [[Fraction(0)] * d for _ in range(d)]
    for i, j, c in obj["g"]:
        gmat[i][j] = scalar_from_json(c)
    return GradedAlgebra(names, parity, mult, gmat)


def matrix_to_json(mat):
    out = []
    for i, row in enumerate(mat):
        for j, x in enumerate(row):
            if not (isinstance(x, (int, Fraction)) and x == 0):
                out.append([i, j, scalar_to_json(x)])
    return out


def matrix_from_json(entries, dim, zero=Fraction(0)):
    mat = [[zero] * dim for _ in range(dim)]
    for i, j, c in entries:
        mat[i][j] = scalar_from_json(c)
    return mat


# ---------------------------------------------------------------------------
# graphs

def _cycle_index_list(g: StableGraph):
    """Cycles in the serialization order: grouped per vertex."""
    return [(v, c) for v in range(g.nv) for c in g.cycles_at(v)]


def graph_to_json(g: StableGraph, word=None):
    cycles = _cycle_index_list(g)
    obj = {
        "flags": g.nflags,
        "sigma": [[list(c) for c in g.cycles_at(v)] for v in range(g.nv)],
        "eta": [list(e) for e in g.edge_list()],
        "gamma": list(g.gamma),
    }
    if any(g.empties):
        obj["empty_cycles"] = list(g.empties)
    if word is not None:
        chosen = {}
        order = []
        for idx, (v, c) in enumerate(cycles):
            if len(c) % 2 == 0:
                first = next(s for s in word if isinstance(s, int) and s in c)
                chosen[str(idx)] = first
        evens = [idx for idx, (v, c) in enumerate(cycles) if len(c) % 2 == 0]
        # order of even cycles by first appearance of any of their symbols
        pos = {}
        for idx in evens:
            v, c = cycles[idx]
            pos[idx] = min(word.index(s) for s in list(c) + [marker(c)])
        order = sorted(evens, key=lambda i: pos[i])
        datum_word = or_datum_to_word(g, {int(k): v for k, v in chosen.items()},
                                      order)
        obj["orientation"] = {
            "chosen": chosen,
            "order": order,
            "sign": word_sign(datum_word, word),
        }
    return obj


def or_datum_to_word(g: StableGraph, chosen, order):
    """Expand (chosen flag per even cycle, order on even cycles) to a word:
    odd blocks first at their minimal flags, then the even blocks as listed."""
    cycles = _cycle_index_list(g)
    w = []
    for idx, (v, c) in enumerate(cycles):
        if len(c) % 2:
            w.extend(block(c, min(c)))
    for v in range(g.nv):
        for i in range(g.empties[v]):
            w.append(empty_marker(v, i))
    for idx in order:
        v, c = cycles[idx]
        w.extend(block(c, chosen[idx]))
    return tuple(w)


def graph_from_json(obj):
    """Returns (graph, word); the word defaults to the canonical one."""
    vcycles = [[tuple(c) for c in cycs] for cycs in obj["sigma"]]
    eta_pairs = [tuple(e) for e in obj["eta"]]
    gamma = obj.get("gamma", [0] * len(vcycles))
    empt = obj.get("empty_cycles", [0] * len(vcycles))
    g = stable_graph(vcycles, eta_pairs, gamma, empt)
    orient = obj.get("orientation")
    if orient is None:
        return g, canonical_or_word(g)
    chosen = {int(k): v for k, v in orient["chosen"].items()}
    word = or_datum_to_word(g, chosen, list(orient["order"]))
    if orient.get("sign", 1) < 0:
        # encode the flip by swapping the first two symbols' roles via an
        # explicit odd transposition of the word
        word = (word[1], word[0]) + word[2:]
    return g, word


def load_fixture(name: str):
    data = resources.files("srgc.fixtures").joinpath(f"{name}.json").read_text()
    return graph_from_json(json.loads(data))


def dump_json(obj, fp=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if fp is None:
        return text
    fp.write(text + "\n")
    return None
