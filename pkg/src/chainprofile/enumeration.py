"""Connected chains and cycles of the cover, enumerated up to the deck action.

Chains grow one unit at a time from single-cell seeds: a unit may raise the
magnitude of a coefficient already present (same sign), or sit on a new cell
provided its boundary strictly cancels part of the current boundary.
Disconnected intermediates are kept while growing; connectivity is filtered
at output.  Representatives are deduplicated up to translation through an
anchor signature.

Oracles with normal forms run on an integer-interned engine (words become
ids, composition is memoized); everything else falls back to chain objects
with bucketed pairwise orbit comparison.
"""

from __future__ import annotations

from .errors import BudgetExceededError, InputError
from .skeleton import (
    Chain,
    LiftedCell,
    add_chains,
    boundary,
    build_chain,
    chains_equal,
    coboundary,
    identity_word,
    is_connected,
    norm,
    translate,
)
from .words import compose, invert, word_key


def chain_signature(a: Chain, oracle):
    """Translation-invariant serialization of a chain's deck orbit.

    Re-anchors the chain at every support cell of least base index and keeps
    the least serialization; anchors are preserved by translation, so equal
    orbits give equal signatures.  Requires an oracle with normal forms (the
    serialization must not depend on how group elements happen to be spelled).
    """
    if not a.terms:
        return ()
    least = min(c.base for c, _ in a.terms)
    best = None
    for c, _ in a.terms:
        if c.base != least:
            continue
        moved = translate(invert(c.word), a, oracle)
        ser = tuple((mc.base, mc.word.letters, n) for mc, n in moved.terms)
        if best is None or ser < best:
            best = ser
    return best


def equal_up_to_translation(a: Chain, b: Chain, oracle) -> bool:
    """Whether some deck translation carries b onto a."""
    if a.dim != b.dim or len(a.terms) != len(b.terms) or norm(a) != norm(b):
        return False
    if not a.terms:
        return True
    anchor, _ = a.terms[0]
    for c, _ in b.terms:
        if c.base != anchor.base:
            continue
        g = compose(anchor.word, invert(c.word))
        if chains_equal(translate(g, b, oracle), a, oracle):
            return True
    return False


def _unit_boundary_norm(s, dim: int) -> int:
    """Largest boundary norm of a single cell of the given dimension."""
    return max((norm(s.boundary_chain(dim, b)) for b in range(s.n_cells(dim))), default=0)


# ------------------------------------------------------- interned fast engine

class _IdEngine:
    """Chains as sorted ((base, word id), coeff) tuples; one id per group
    element under the oracle's normal form."""

    def __init__(self, s, oracle, dim: int):
        self.s = s
        self.oracle = oracle
        self.dim = dim
        self.words = []
        self.lengths = []
        self.ids = {}
        self._compose = {}
        self._invert = {}
        self._unit_bnd = {}
        self._cob = {}
        self.e = self.intern(identity_word(s.presentation.generators))
        self.base_bnd = []
        for base in range(s.n_cells(dim)):
            self.base_bnd.append(tuple(
                (bc.base, self.intern(bc.word), n)
                for bc, n in s.boundary_chain(dim, base).terms))
        if dim < s.q:
            self.up_bnd = [tuple((bc.base, self.intern(bc.word), n)
                                 for bc, n in s.boundary_chain(dim + 1, base).terms)
                           for base in range(s.n_cells(dim + 1))]
        else:
            self.up_bnd = []
        # cells of dimension dim reachable through a shared boundary cell:
        # for each base cell, its stored boundary terms grouped for the scan
        self._down = {}
        for tbase, terms in enumerate(self.base_bnd):
            for hbase, hwid, _ in terms:
                self._down.setdefault(hbase, []).append((tbase, hwid))

    def intern(self, word) -> int:
        w = self.oracle.normalize(word)
        wid = self.ids.get(w.letters)
        if wid is None:
            wid = len(self.words)
            self.ids[w.letters] = wid
            self.words.append(w)
            self.lengths.append(len(w.letters))
        return wid

    def distance(self, a: int, b: int) -> int:
        """Word-metric distance; exact when normal forms are geodesic."""
        return self.lengths[self.compose(self.invert(a), b)]

    def compose(self, a: int, b: int) -> int:
        key = (a, b)
        out = self._compose.get(key)
        if out is None:
            out = self.intern(compose(self.words[a], self.words[b]))
            self._compose[key] = out
        return out

    def invert(self, a: int) -> int:
        out = self._invert.get(a)
        if out is None:
            out = self.intern(invert(self.words[a]))
            self._invert[a] = out
        return out

    def unit_boundary(self, base: int, wid: int):
        """Boundary of the +1 unit on (wid, base), as ((cell, coeff), ...)."""
        key = (base, wid)
        out = self._unit_bnd.get(key)
        if out is None:
            acc = {}
            for bbase, bwid, n in self.base_bnd[base]:
                cell = (bbase, self.compose(wid, bwid))
                acc[cell] = acc.get(cell, 0) + n
            out = tuple((cell, n) for cell, n in sorted(acc.items()) if n)
            self._unit_bnd[key] = out
        return out

    def adjacent_cells(self, bcell):
        """Dimension-dim cells whose boundary touches the given cell."""
        out = self._cob.get(bcell)
        if out is None:
            bbase, bwid = bcell
            found = {}
            for tbase, hwid in self._down.get(bbase, ()):
                found[(tbase, self.compose(bwid, self.invert(hwid)))] = None
            out = tuple(found)
            self._cob[bcell] = out
        return out

    def seed(self, base: int, sign: int):
        return (((base, self.e), sign),)

    def add_unit(self, chain, cell, sign):
        """chain + sign on cell, keeping terms sorted by cell."""
        out = []
        placed = False
        for c, n in chain:
            if c == cell:
                m = n + sign
                if m:
                    out.append((c, m))
                placed = True
            elif not placed and c > cell:
                out.append((cell, sign))
                placed = True
                out.append((c, n))
            else:
                out.append((c, n))
        if not placed:
            out.append((cell, sign))
        return tuple(out)

    def signature(self, chain):
        least = min(c[0] for c, _ in chain)
        best = None
        for (base, wid), _ in chain:
            if base != least:
                continue
            g = self.invert(wid)
            ser = tuple(sorted(((b, self.compose(g, w)), n) for (b, w), n in chain))
            if best is None or ser < best:
                best = ser
        return best

    def to_chain(self, chain) -> Chain:
        pairs = [(LiftedCell(self.dim, base, self.words[wid]), n)
                 for (base, wid), n in chain]
        return build_chain(self.dim, pairs, self.oracle)


def _grow_interned(s, oracle, dim, max_norm, node_cap, cycle_target):
    eng = _IdEngine(s, oracle, dim)
    beta = _unit_boundary_norm(s, dim)
    # Distance pruning toward cycles.  The units still to be added form a
    # chain T with boundary -dB; each component of T is a chain of units
    # linked through shared boundary cells, so any boundary cell it covers
    # lies within (norm of the component) * spread of an opposite-sign cell,
    # where spread bounds how far apart one unit's boundary elements sit.
    # Sound when unit boundary coefficients sum to zero (each component must
    # balance signs) and normalized lengths are true distances.
    balanced = all(sum(c for _, _, c in eng.base_bnd[b]) == 0
                   for b in range(s.n_cells(dim)))
    use_distance = (cycle_target and balanced
                    and getattr(oracle, "geodesic_normal_forms", False))
    spread = 1
    for b in range(s.n_cells(dim)):
        offs = [wid for _, wid, _ in eng.base_bnd[b]]
        for i in range(len(offs)):
            for j in range(i + 1, len(offs)):
                spread = max(spread, eng.distance(offs[i], offs[j]))
    seen = set()
    frontier = []
    for base in range(s.n_cells(dim)):
        for sign in (1, -1):
            chain = eng.seed(base, sign)
            sig = eng.signature(chain)
            if sig not in seen:
                seen.add(sig)
                bnd = {}
                for cell, n in eng.unit_boundary(base, eng.e):
                    if n * sign:
                        bnd[cell] = n * sign
                frontier.append((chain, bnd, sum(abs(v) for v in bnd.values())))
    out = {}
    processed = 0
    for n in range(1, max_norm + 1):
        if cycle_target:
            frontier = [f for f in frontier if f[2] <= beta * (max_norm - n)]
        out[n] = frontier
        if n == max_norm:
            break
        nxt = []
        for chain, bnd, bnorm in frontier:
            processed += 1
            if node_cap is not None and processed > node_cap:
                raise BudgetExceededError(
                    f"enumeration expanded more than {node_cap} chains")
            support = dict(chain)
            cands = {}
            for cell, coeff in chain:
                cands[(cell, 1 if coeff > 0 else -1)] = True
            for bcell in bnd:
                for cell in eng.adjacent_cells(bcell):
                    existing = support.get(cell)
                    if existing is None:
                        cands.setdefault((cell, 1), False)
                        cands.setdefault((cell, -1), False)
                    else:
                        cands.setdefault((cell, 1 if existing > 0 else -1), True)
            for (cell, sign), increments in sorted(cands.items()):
                ub = eng.unit_boundary(*cell)
                new_bnd = dict(bnd)
                ub_norm = 0
                for bcell, c in ub:
                    c *= sign
                    ub_norm += abs(c)
                    v = new_bnd.get(bcell, 0) + c
                    if v:
                        new_bnd[bcell] = v
                    else:
                        new_bnd.pop(bcell, None)
                new_norm = sum(abs(v) for v in new_bnd.values())
                if not increments and new_norm >= bnorm + ub_norm:
                    continue
                if cycle_target and new_norm > beta * (max_norm - n - 1):
                    continue
                if use_distance and new_bnd:
                    remaining = max_norm - n - 1
                    plus = [c for c, v in new_bnd.items() if v > 0]
                    minus = [c for c, v in new_bnd.items() if v < 0]
                    if not plus or not minus:
                        continue
                    need = 0
                    for (_, wa) in plus:
                        nearest = min(eng.distance(wa, wb) for (_, wb) in minus)
                        need = max(need, -(-nearest // spread))
                    for (_, wb) in minus:
                        nearest = min(eng.distance(wc, wb) for (_, wc) in plus)
                        need = max(need, -(-nearest // spread))
                    if need > remaining:
                        continue
                grown = eng.add_unit(chain, cell, sign)
                sig = eng.signature(grown)
                if sig not in seen:
                    seen.add(sig)
                    nxt.append((grown, new_bnd, new_norm))
        frontier = nxt
    return eng, out


# ------------------------------------------------------ object-based fallback

def _orbit_bucket(a: Chain):
    """Cheap translation invariant used to group pairwise comparisons."""
    return tuple(sorted((c.base, n) for c, n in a.terms))


class _OrbitSet:
    """Chains seen so far, one per deck orbit, compared pairwise."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.buckets = {}

    def add(self, a: Chain) -> bool:
        bucket = self.buckets.setdefault(_orbit_bucket(a), [])
        for other in bucket:
            if equal_up_to_translation(other, a, self.oracle):
                return False
        bucket.append(a)
        return True


def _grow_objects(s, oracle, dim, max_norm, node_cap, cycle_target):
    beta = _unit_boundary_norm(s, dim)
    e = identity_word(s.presentation.generators)
    seen = _OrbitSet(oracle)
    cob_cache = {}
    frontier = []
    for base in range(s.n_cells(dim)):
        for sign in (1, -1):
            a = build_chain(dim, [(LiftedCell(dim, base, e), sign)], oracle)
            if seen.add(a):
                frontier.append((a, boundary(a, s, oracle)))
    out = {}
    processed = 0
    for n in range(1, max_norm + 1):
        if cycle_target:
            frontier = [(a, b) for a, b in frontier
                        if norm(b) <= beta * (max_norm - n)]
        out[n] = frontier
        if n == max_norm:
            break
        nxt = []
        for a, bnd in frontier:
            processed += 1
            if node_cap is not None and processed > node_cap:
                raise BudgetExceededError(
                    f"enumeration expanded more than {node_cap} chains")
            bnorm = norm(bnd)
            cands = {}
            for c, coeff in a.terms:
                cands[(c, 1 if coeff > 0 else -1)] = None
            for bc, _ in bnd.terms:
                key = (bc.base, bc.word.letters)
                hit = cob_cache.get(key)
                if hit is None:
                    hit = coboundary(bc, s, oracle)
                    cob_cache[key] = hit
                for tc, _ in hit.terms:
                    existing = a.coeff(tc)
                    if existing == 0:
                        cands.setdefault((tc, 1), None)
                        cands.setdefault((tc, -1), None)
                    else:
                        cands.setdefault((tc, 1 if existing > 0 else -1), None)
            for cell, sign in sorted(cands, key=lambda cs: (cs[0].base, word_key(cs[0].word), cs[1])):
                unit = build_chain(dim, [(cell, sign)], oracle)
                ubnd = boundary(unit, s, oracle)
                new_bnd = add_chains(bnd, ubnd, oracle)
                on_support = a.coeff(cell) != 0
                if not on_support and norm(new_bnd) >= bnorm + norm(ubnd):
                    continue
                if cycle_target and norm(new_bnd) > beta * (max_norm - n - 1):
                    continue
                grown = add_chains(a, unit, oracle)
                if seen.add(grown):
                    nxt.append((grown, new_bnd))
        frontier = nxt
    return out


# ----------------------------------------------------------------- public API

def _chain_sort_key(a: Chain):
    return tuple((c.base, word_key(c.word), n) for c, n in a.terms)


def reachable_chains(s, oracle, dim: int, max_norm: int,
                     node_cap: int | None = None, cycle_target: bool = False):
    """All chains the growth procedure reaches, one per orbit, by norm.

    Returns dict norm -> list of (chain, boundary) pairs.  With cycle_target,
    chains whose boundary norm exceeds what the remaining units can cancel
    are dropped.
    """
    if dim < 1 or dim > s.q:
        raise InputError(f"enumeration dimension {dim} outside 1..{s.q}")
    if getattr(oracle, "has_normal_forms", False):
        eng, reached = _grow_interned(s, oracle, dim, max_norm, node_cap, cycle_target)
        out = {}
        for n, triples in reached.items():
            pairs = []
            for chain, bnd, _ in triples:
                a = eng.to_chain(chain)
                b = build_chain(dim - 1,
                                [(LiftedCell(dim - 1, base, eng.words[wid]), c)
                                 for (base, wid), c in bnd.items()], oracle)
                pairs.append((a, b))
            pairs.sort(key=lambda ab: _chain_sort_key(ab[0]))
            out[n] = pairs
        return out
    out = _grow_objects(s, oracle, dim, max_norm, node_cap, cycle_target)
    for n in out:
        out[n] = sorted(out[n], key=lambda ab: _chain_sort_key(ab[0]))
    return out


def connected_chains_up_to_action(s, oracle, dim: int, max_norm: int,
                                  node_cap: int | None = None):
    """Connected chains up to translation, as dict norm -> representatives."""
    reached = reachable_chains(s, oracle, dim, max_norm, node_cap=node_cap)
    return {n: [a for a, _ in pairs if is_connected(a, s, oracle)]
            for n, pairs in reached.items()}


def connected_cycles_up_to_action(s, oracle, dim: int, max_norm: int,
                                  node_cap: int | None = None):
    """Connected cycles up to translation, as dict norm -> representatives."""
    reached = reachable_chains(s, oracle, dim, max_norm,
                               node_cap=node_cap, cycle_target=True)
    return {n: [a for a, b in pairs if not b.terms and is_connected(a, s, oracle)]
            for n, pairs in reached.items()}
