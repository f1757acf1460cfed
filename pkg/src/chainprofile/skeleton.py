"""Cellular skeleton of the universal cover and its integer chain algebra.

A skeleton records the finitely many base cells of a complex with one free
group action orbit per cell.  A lifted cell is a pair (group element, base
cell); a chain is a finite integer combination of lifted cells of one
dimension, kept in canonical form: words oracle-normalized when the oracle
has normal forms (freely reduced class representatives otherwise), equal
cells merged, zero coefficients dropped, terms sorted by dimension, base
cell index, then shortlex word.

Subchains, components, and connectivity follow the coefficient-window
definitions: B is a subchain of A when, cell by cell, the coefficient of B
lies between 0 and that of A; a component is a subchain whose boundary is a
subchain of the boundary; A is connected when its only components are 0 and
A itself.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass

from .errors import (
    InputError,
    InvalidSkeletonError,
    OracleUndecidedError,
)
from .words import (
    OracleVerdict,
    Presentation,
    Word,
    compose,
    format_word,
    free_reduce,
    invert,
    parse_word,
    word_key,
    words_equal,
)


@dataclass(frozen=True)
class LiftedCell:
    """A lift (g, sigma) of base cell number `base` in dimension `dim`."""
    dim: int
    base: int
    word: Word


def cell_key(c: LiftedCell):
    return (c.dim, c.base, word_key(c.word))


@dataclass(frozen=True)
class Chain:
    """Canonical integer chain: sorted merged terms with nonzero coefficients."""
    dim: int
    terms: tuple[tuple[LiftedCell, int], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def support(self):
        return tuple(c for c, _ in self.terms)

    def coeff(self, cell: LiftedCell) -> int:
        for c, n in self.terms:
            if c == cell:
                return n
        return 0


def zero_chain(dim: int) -> Chain:
    return Chain(dim, ())


def norm(a: Chain) -> int:
    return sum(abs(n) for _, n in a.terms)


# ------------------------------------------------------------------ skeleton

class SkeletonSpec:
    """Base cells of the complex, with stored boundary chains.

    cells: iterable of (dim, id, boundary) where boundary lists
    (word, base_id, coeff) triples over cells one dimension down.
    """

    def __init__(self, q: int, presentation: Presentation, cells):
        if q < 2:
            raise InvalidSkeletonError(f"dimension must be at least 2, got {q}")
        self.q = q
        self.presentation = presentation
        self.ids: list[list[str]] = [[] for _ in range(q + 1)]
        self.index: dict[str, tuple[int, int]] = {}
        raw = []
        for dim, cid, bnd in cells:
            if not 0 <= dim <= q:
                raise InvalidSkeletonError(f"cell {cid!r} has dimension {dim} outside 0..{q}")
            if cid in self.index:
                raise InvalidSkeletonError(f"duplicate cell id {cid!r}")
            self.index[cid] = (dim, len(self.ids[dim]))
            self.ids[dim].append(cid)
            raw.append((dim, cid, list(bnd)))
        if not self.ids[0]:
            raise InvalidSkeletonError("skeleton has no vertices")

        # stored boundary chains, exact-merged (no oracle at build time)
        self.boundaries: list[list[Chain]] = [[] for _ in range(q + 1)]
        for dim, cid, bnd in raw:
            if dim == 0:
                if bnd:
                    raise InvalidSkeletonError(f"vertex {cid!r} has a boundary")
                self.boundaries[0].append(zero_chain(-1))
                continue
            acc: dict[tuple, int] = {}
            words_seen: dict[tuple, Word] = {}
            for word, base_id, coeff in bnd:
                if base_id not in self.index:
                    raise InvalidSkeletonError(
                        f"cell {cid!r} boundary references unknown cell {base_id!r}")
                bdim, bidx = self.index[base_id]
                if bdim != dim - 1:
                    raise InvalidSkeletonError(
                        f"cell {cid!r} boundary references {base_id!r} of dimension {bdim}")
                w = free_reduce(word)
                key = (bidx, w.letters)
                acc[key] = acc.get(key, 0) + coeff
                words_seen[key] = w
            terms = tuple(
                (LiftedCell(dim - 1, bidx, words_seen[(bidx, letters)]), n)
                for (bidx, letters), n in sorted(
                    acc.items(), key=lambda kv: (kv[0][0], word_key(words_seen[kv[0]])))
                if n
            )
            self.boundaries[dim].append(Chain(dim - 1, terms))

    def n_cells(self, dim: int) -> int:
        return len(self.ids[dim])

    def cell_id(self, dim: int, base: int) -> str:
        return self.ids[dim][base]

    def boundary_chain(self, dim: int, base: int) -> Chain:
        return self.boundaries[dim][base]

    def to_json_dict(self) -> dict:
        cells = []
        for dim in range(self.q + 1):
            for base, cid in enumerate(self.ids[dim]):
                entry: dict = {"dim": dim, "id": cid}
                if dim > 0:
                    entry["boundary"] = [
                        {"word": format_word(c.word), "base": self.cell_id(dim - 1, c.base),
                         "coeff": n}
                        for c, n in self.boundary_chain(dim, base).terms
                    ]
                cells.append(entry)
        return {
            "dim": self.q,
            "presentation": {
                "generators": list(self.presentation.generators),
                "relators": [format_word(r) for r in self.presentation.relators],
            },
            "cells": cells,
        }


def presentation_complex(p: Presentation) -> SkeletonSpec:
    """One vertex, one edge per generator, one 2-cell per relator.

    The relator cell boundary lifts the relator letter by letter: reading
    y1^e1 ... yk^ek with reduced prefixes w0 = 1, wi = w(i-1) * yi^ei, the
    i-th term is +(w(i-1), e_yi) for ei = +1 and -(wi, e_yi) for ei = -1.
    """
    gens = p.generators
    cells: list = [(0, "v", [])]
    for name in gens:
        cells.append((1, f"e_{name}", [(identity_word(gens), "v", -1),
                                       (Word(gens, ((gens.index(name), 1),)), "v", 1)]))
    for i, r in enumerate(p.relators):
        bnd = []
        w = identity_word(gens)
        for g, s in r.letters:
            name = gens[g]
            if s > 0:
                bnd.append((w, f"e_{name}", 1))
                w = compose(w, Word(gens, ((g, 1),)))
            else:
                w = compose(w, Word(gens, ((g, -1),)))
                bnd.append((w, f"e_{name}", -1))
        cells.append((2, f"f{i}", bnd))
    return SkeletonSpec(2, p, cells)


def identity_word(gens) -> Word:
    return Word(tuple(gens), ())


# ------------------------------------------------------------ canonical form

def _canonical_cells(raw_cells, oracle):
    """Map raw (base, word) pairs of one dimension to canonical cells.

    Returns a dict (base, letters) -> (base, canonical word).  With normal
    forms this is one rewrite per distinct word; otherwise pairwise equality
    tests run inside groups sharing the oracle's cheap invariant.
    """
    out = {}
    if getattr(oracle, "has_normal_forms", False):
        memo: dict[tuple, Word] = {}
        for base, word in raw_cells:
            key = (base, word.letters)
            if key in out:
                continue
            nw = memo.get(word.letters)
            if nw is None:
                nw = oracle.normalize(word)
                memo[word.letters] = nw
            out[key] = (base, nw)
        return out

    groups: dict[tuple, list[Word]] = {}
    seen = set()
    for base, word in raw_cells:
        key = (base, word.letters)
        if key in seen:
            continue
        seen.add(key)
        groups.setdefault((base, oracle.invariant_key(word)), []).append(word)
    for (base, _), members in groups.items():
        members.sort(key=word_key)
        reps: list[Word] = []
        assign: list[int] = []
        for w in members:
            for ri, rep in enumerate(reps):
                verdict = words_equal(oracle, rep, w)
                if verdict is OracleVerdict.UNDECIDED:
                    raise OracleUndecidedError(
                        f"oracle could not decide {format_word(rep)} vs {format_word(w)}")
                if verdict is OracleVerdict.TRIVIAL:
                    assign.append(ri)
                    break
            else:
                assign.append(len(reps))
                reps.append(w)
        for w, ri in zip(members, assign):
            out[(base, w.letters)] = (base, reps[ri])
    return out


def build_chain(dim: int, pairs, oracle) -> Chain:
    """Canonical chain from raw (LiftedCell, coeff) pairs."""
    raw = [(c, n) for c, n in pairs if n]
    for c, _ in raw:
        if c.dim != dim:
            raise InputError(f"cell of dimension {c.dim} in a {dim}-chain")
    cellmap = _canonical_cells(((c.base, free_reduce(c.word)) for c, _ in raw), oracle)
    acc: dict[tuple, tuple[Word, int]] = {}
    for c, n in raw:
        base, w = cellmap[(c.base, free_reduce(c.word).letters)]
        key = (base, w.letters)
        prev = acc.get(key)
        acc[key] = (w, n if prev is None else prev[1] + n)
    terms = tuple(
        (LiftedCell(dim, base, w), n)
        for (base, _), (w, n) in sorted(acc.items(),
                                        key=lambda kv: (kv[0][0], word_key(kv[1][0])))
        if n
    )
    return Chain(dim, terms)


def canonicalize(a: Chain, oracle) -> Chain:
    return build_chain(a.dim, a.terms, oracle)


def add_chains(a: Chain, b: Chain, oracle) -> Chain:
    if a.dim != b.dim:
        raise InputError(f"cannot add chains of dimensions {a.dim} and {b.dim}")
    return build_chain(a.dim, tuple(a.terms) + tuple(b.terms), oracle)


def scale_chain(a: Chain, s: int) -> Chain:
    if s == 0:
        return zero_chain(a.dim)
    return Chain(a.dim, tuple((c, n * s) for c, n in a.terms))


def negate(a: Chain) -> Chain:
    return Chain(a.dim, tuple((c, -n) for c, n in a.terms))


# ------------------------------------------------------------------ operators

def boundary(a: Chain, s: SkeletonSpec, oracle) -> Chain:
    """Boundary of a chain; lifts commute with the deck action, so each term
    contributes its translated stored boundary."""
    if a.dim < 1:
        raise InputError("chains of dimension 0 have no boundary")
    raw = []
    for c, n in a.terms:
        for bc, bn in s.boundary_chain(c.dim, c.base).terms:
            raw.append((LiftedCell(a.dim - 1, bc.base, compose(c.word, bc.word)), bn * n))
    return build_chain(a.dim - 1, raw, oracle)


def translate(g: Word, a: Chain, oracle) -> Chain:
    raw = [(LiftedCell(c.dim, c.base, compose(g, c.word)), n) for c, n in a.terms]
    return build_chain(a.dim, raw, oracle)


def is_cycle(a: Chain, s: SkeletonSpec, oracle) -> bool:
    if a.dim < 1:
        raise InputError("cycles live in dimension 1 and up")
    return not boundary(a, s, oracle).terms


def validate(s: SkeletonSpec, oracle) -> bool:
    """Check boundary-of-boundary vanishes for every base cell.

    Structural soundness (references, dimensions) is enforced at build time;
    this pass needs the oracle because cancellation happens between lifts
    whose words are equal only in the group.
    """
    for dim in range(2, s.q + 1):
        for base in range(s.n_cells(dim)):
            cell = Chain(dim, ((LiftedCell(dim, base, identity_word(s.presentation.generators)), 1),))
            dd = boundary(boundary(cell, s, oracle), s, oracle)
            if dd.terms:
                raise InvalidSkeletonError(
                    f"boundary of boundary of cell {s.cell_id(dim, base)!r} is nonzero")
    return True


def coboundary(c: LiftedCell, s: SkeletonSpec, oracle) -> Chain:
    """All lifted (dim+1)-cells whose boundary touches c, with coefficients.

    Scan rule: for each base cell tau one dimension up and each boundary term
    (h, base(c)) of tau, the candidate lift sits at g = word(c) * h^-1; its
    coefficient is the sum over matching terms.
    """
    dim = c.dim
    if dim >= s.q:
        raise InputError(f"no cells above dimension {s.q}")
    out = []
    for tbase in range(s.n_cells(dim + 1)):
        bnd = s.boundary_chain(dim + 1, tbase).terms
        cands = []
        for bc, bn in bnd:
            if bc.base != c.base:
                continue
            cands.append(compose(c.word, invert(bc.word)))
        if not cands:
            continue
        cellmap = _canonical_cells(((tbase, g) for g in cands), oracle)
        distinct = {}
        for g in cands:
            base, rep = cellmap[(tbase, free_reduce(g).letters)]
            distinct[(base, rep.letters)] = rep
        for (_, _), rep in sorted(distinct.items(), key=lambda kv: word_key(kv[1])):
            total = 0
            for bc, bn in bnd:
                if bc.base != c.base:
                    continue
                verdict = words_equal(oracle, compose(rep, bc.word), c.word)
                if verdict is OracleVerdict.UNDECIDED:
                    raise OracleUndecidedError(
                        f"oracle could not decide a coboundary match at {format_word(rep)}")
                if verdict is OracleVerdict.TRIVIAL:
                    total += bn
            if total:
                out.append((LiftedCell(dim + 1, tbase, rep), total))
    return build_chain(dim + 1, out, oracle)


# ----------------------------------------------------- subchains, components

def subchains(a: Chain):
    """All subchains, the zero chain and a itself included."""
    ranges = [range(0, abs(n) + 1) for _, n in a.terms]
    signs = [1 if n > 0 else -1 for _, n in a.terms]
    cells = [c for c, _ in a.terms]
    for combo in itertools.product(*ranges):
        terms = tuple((c, s * t) for c, s, t in zip(cells, signs, combo) if t)
        yield Chain(a.dim, terms)


def is_subchain(b: Chain, a: Chain, oracle) -> bool:
    """Cellwise: coefficient of b lies between 0 and the coefficient of a."""
    if b.dim != a.dim:
        return False
    acoeff = _coeff_lookup(a, oracle)
    for c, nb in b.terms:
        na = acoeff(c)
        if na >= 0:
            if not 0 <= nb <= na:
                return False
        else:
            if not na <= nb <= 0:
                return False
    return True


def _coeff_lookup(a: Chain, oracle):
    """Coefficient accessor handling oracles without normal forms, where the
    same group element may be spelled differently in different chains."""
    table = {(c.base, c.word.letters): n for c, n in a.terms}
    if getattr(oracle, "has_normal_forms", False):
        def get(c: LiftedCell) -> int:
            nw = oracle.normalize(c.word)
            return table.get((c.base, nw.letters), 0)
        return get

    by_base: dict[int, list[tuple[LiftedCell, int]]] = {}
    for c, n in a.terms:
        by_base.setdefault(c.base, []).append((c, n))

    def get(c: LiftedCell) -> int:
        direct = table.get((c.base, free_reduce(c.word).letters))
        if direct is not None:
            return direct
        key = oracle.invariant_key(c.word)
        for ac, n in by_base.get(c.base, ()):
            if key is not None and oracle.invariant_key(ac.word) != key:
                continue
            verdict = words_equal(oracle, ac.word, c.word)
            if verdict is OracleVerdict.UNDECIDED:
                raise OracleUndecidedError("oracle could not decide a cell match")
            if verdict is OracleVerdict.TRIVIAL:
                return n
        return 0
    return get


def chains_equal(a: Chain, b: Chain, oracle) -> bool:
    if a.dim != b.dim or len(a.terms) != len(b.terms):
        return False
    if getattr(oracle, "has_normal_forms", False):
        return a.terms == b.terms
    bcoeff = _coeff_lookup(b, oracle)
    return all(bcoeff(c) == n for c, n in a.terms) and norm(a) == norm(b)


def subtract_subchain(a: Chain, b: Chain) -> Chain:
    """a - b for b a literal subchain of a (cells spelled as in a)."""
    bmap = {(c.base, c.word.letters): n for c, n in b.terms}
    terms = []
    for c, n in a.terms:
        m = n - bmap.get((c.base, c.word.letters), 0)
        if m:
            terms.append((c, m))
    return Chain(a.dim, tuple(terms))


def _aligned_units(a: Chain, s: SkeletonSpec, oracle):
    """Boundaries of the signed unit cells of a, over one shared cell index.

    Returns (unit_vectors, totals) where unit_vectors[i] maps boundary-cell
    index -> coefficient of the boundary of sign(n_i) * cell_i, and totals
    is the coefficient vector of boundary(a).  Joint canonicalization keeps
    cell identities consistent across units for any oracle.
    """
    raw_units = []
    for c, n in a.terms:
        sgn = 1 if n > 0 else -1
        raw = []
        for bc, bn in s.boundary_chain(c.dim, c.base).terms:
            raw.append((bc.base, compose(c.word, bc.word), bn * sgn))
        raw_units.append(raw)
    all_cells = [(base, w) for raw in raw_units for base, w, _ in raw]
    cellmap = _canonical_cells(iter(all_cells), oracle)
    index: dict[tuple, int] = {}
    units = []
    for raw in raw_units:
        vec: dict[int, int] = {}
        for base, w, coeff in raw:
            cbase, rep = cellmap[(base, free_reduce(w).letters)]
            key = (cbase, rep.letters)
            if key not in index:
                index[key] = len(index)
            i = index[key]
            vec[i] = vec.get(i, 0) + coeff
            if not vec[i]:
                del vec[i]
        units.append(vec)
    totals: dict[int, int] = {}
    for (c, n), vec in zip(a.terms, units):
        for i, d in vec.items():
            totals[i] = totals.get(i, 0) + d * abs(n)
            if not totals[i]:
                del totals[i]
    return units, totals


def _find_component(a: Chain, s: SkeletonSpec, oracle, target_norm=None):
    """Smallest proper nonzero component as a coefficient vector, or None.

    Scans candidate subchains by increasing norm (or only target_norm when
    given), choosing per-cell magnitudes in canonical term order, pruning on
    boundary cells whose contributors are all decided.
    """
    k = len(a.terms)
    if k == 0:
        return None
    units, totals = _aligned_units(a, s, oracle)
    mags = [abs(n) for _, n in a.terms]
    full = sum(mags)
    last_touch: dict[int, int] = {}
    for i, vec in enumerate(units):
        for x in vec:
            last_touch[x] = i
    suffix = [0] * (k + 1)
    for i in range(k - 1, -1, -1):
        suffix[i] = suffix[i + 1] + mags[i]

    def dfs(i, used, partial, v):
        if used + suffix[i] < v:
            return None
        if i == k:
            return () if used == v else None
        lo = max(0, v - used - suffix[i + 1])
        hi = min(mags[i], v - used)
        for t in range(lo, hi + 1):
            newp = partial
            if t and units[i]:
                newp = dict(partial)
                for x, d in units[i].items():
                    val = newp.get(x, 0) + d * t
                    if val:
                        newp[x] = val
                    else:
                        newp.pop(x, None)
            ok = True
            for x in units[i]:
                if last_touch[x] == i:
                    val = newp.get(x, 0)
                    tot = totals.get(x, 0)
                    if tot >= 0:
                        if not 0 <= val <= tot:
                            ok = False
                            break
                    else:
                        if not tot <= val <= 0:
                            ok = False
                            break
            if not ok:
                continue
            rest = dfs(i + 1, used + t, newp, v)
            if rest is not None:
                return (t,) + rest
        return None

    norms = [target_norm] if target_norm is not None else range(1, full)
    for v in norms:
        found = dfs(0, 0, {}, v)
        if found is not None:
            return found
    return None


def _vector_to_subchain(a: Chain, vec) -> Chain:
    terms = []
    for (c, n), t in zip(a.terms, vec):
        if t:
            terms.append((c, t if n > 0 else -t))
    return Chain(a.dim, tuple(terms))


def is_connected(a: Chain, s: SkeletonSpec, oracle) -> bool:
    """True when the only components are 0 and the chain itself."""
    if not a.terms:
        return False
    return _find_component(a, s, oracle) is None


def components(a: Chain, s: SkeletonSpec, oracle) -> list[Chain]:
    """Decompose into connected components, smallest split off first.

    The norm laws hold exactly: component norms sum to the chain norm, and
    component boundary norms sum to the boundary norm.
    """
    out = []
    rest = a
    while rest.terms:
        vec = _find_component(rest, s, oracle)
        if vec is None:
            out.append(rest)
            return out
        piece = _vector_to_subchain(rest, vec)
        out.append(piece)
        rest = subtract_subchain(rest, piece)
    return out


# -------------------------------------------------------------- serialization

def chain_to_json(a: Chain, s: SkeletonSpec) -> dict:
    return {
        "dim": a.dim,
        "terms": [
            {"word": format_word(c.word), "base": s.cell_id(c.dim, c.base), "coeff": n}
            for c, n in a.terms
        ],
    }


def chain_from_json(data: dict, s: SkeletonSpec, oracle) -> Chain:
    try:
        dim = int(data["dim"])
        raw = []
        for t in data["terms"]:
            base_id = t["base"]
            if base_id not in s.index:
                raise InputError(f"unknown cell id {base_id!r}")
            bdim, bidx = s.index[base_id]
            if bdim != dim:
                raise InputError(f"cell {base_id!r} has dimension {bdim}, chain says {dim}")
            w = parse_word(t["word"], s.presentation.generators)
            raw.append((LiftedCell(dim, bidx, w), int(t["coeff"])))
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed chain data: {e}") from None
    return build_chain(dim, raw, oracle)


def skeleton_fingerprint(s: SkeletonSpec, oracle) -> str:
    payload = json.dumps(s.to_json_dict(), sort_keys=True) + "|" + oracle.name
    return hashlib.sha256(payload.encode()).hexdigest()[:16]
