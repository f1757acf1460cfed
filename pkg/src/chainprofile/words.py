"""Free-group word algebra, presentations, and word-problem oracles.

Words are tuples of (generator index, sign) letters over a fixed generator
alphabet.  Every operation returns freely reduced words; callers constructing
a Word directly are expected to pass reduced letters or reduce afterwards.

Oracles answer the word problem for the group presented by a presentation.
A verdict is Trivial, Nontrivial, or Undecided; Undecided means the oracle's
budget or scope ran out, never that the answer is unknowable.  Soundness of
an oracle for its presentation is a user assertion; the package checks what
it can cheaply (finite tables are validated against the relators).
"""

from __future__ import annotations

import enum
import hashlib
import heapq
import itertools
import re
from dataclasses import dataclass

from .errors import AlphabetError, InputError, ParseError

Letter = tuple[int, int]


@dataclass(frozen=True)
class Word:
    """A word over a generator alphabet; letters are (index, +1/-1)."""
    gens: tuple[str, ...]
    letters: tuple[Letter, ...] = ()

    def __mul__(self, other: "Word") -> "Word":
        return compose(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


def identity(gens: tuple[str, ...]) -> Word:
    return Word(tuple(gens), ())


def _reduce_letters(letters) -> tuple[Letter, ...]:
    out = []
    for g, s in letters:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def free_reduce(w: Word) -> Word:
    """Freely reduced form; idempotent."""
    reduced = _reduce_letters(w.letters)
    if reduced == w.letters:
        return w
    return Word(w.gens, reduced)


def _concat_reduced(a: tuple[Letter, ...], b: tuple[Letter, ...]) -> tuple[Letter, ...]:
    """Concatenate two already reduced letter tuples, cancelling the junction."""
    i = len(a)
    j = 0
    while i > 0 and j < len(b) and a[i - 1][0] == b[j][0] and a[i - 1][1] == -b[j][1]:
        i -= 1
        j += 1
    return a[:i] + b[j:]


def compose(w1: Word, w2: Word) -> Word:
    if w1.gens != w2.gens:
        raise AlphabetError(
            f"cannot compose words over alphabets {w1.gens} and {w2.gens}")
    a = _reduce_letters(w1.letters)
    b = _reduce_letters(w2.letters)
    return Word(w1.gens, _concat_reduced(a, b))


def invert(w: Word) -> Word:
    return Word(w.gens, tuple((g, -s) for g, s in reversed(_reduce_letters(w.letters))))


def word_key(w: Word):
    """Shortlex sort key: length, then letters with + before - per generator."""
    return (len(w.letters), tuple((g, 0 if s > 0 else 1) for g, s in w.letters))


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    for (g, s), run in itertools.groupby(w.letters):
        k = s * len(list(run))
        name = w.gens[g]
        parts.append(name if k == 1 else f"{name}^{k}")
    return " ".join(parts)


_WORD_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|\^\s*-?\d+|1|\S")


def _split_identifier(tok: str, gens: tuple[str, ...]) -> list[int]:
    """Greedy longest-first split of a juxtaposed identifier into generators."""
    by_len = sorted(gens, key=len, reverse=True)
    out = []
    pos = 0
    while pos < len(tok):
        for name in by_len:
            if tok.startswith(name, pos):
                out.append(gens.index(name))
                pos += len(name)
                break
        else:
            raise ParseError(f"unknown generator in {tok!r}")
    return out


def parse_word(text: str, gens: tuple[str, ...]) -> Word:
    """Parse a word like 'a b a^-1 b^-1', 'a^2 b', 'aba^-1'; '1' is empty."""
    gens = tuple(gens)
    letters: list[Letter] = []
    last_unit: list[Letter] = []  # letters of the unit a trailing power applies to

    for tok in _WORD_TOKEN.findall(text):
        if tok == "1":
            last_unit = []
            continue
        if tok.startswith("^"):
            k = int(tok[1:].strip())
            if not last_unit:
                raise ParseError(f"power with nothing to apply it to in {text!r}")
            del letters[len(letters) - len(last_unit):]
            g, s = last_unit[-1]
            letters.extend(last_unit[:-1])
            if k >= 0:
                letters.extend([(g, s)] * k)
            else:
                letters.extend([(g, -s)] * (-k))
            last_unit = []
            continue
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok):
            if tok in gens:
                unit = [(gens.index(tok), 1)]
            else:
                unit = [(i, 1) for i in _split_identifier(tok, gens)]
            letters.extend(unit)
            last_unit = unit[-1:]
            continue
        raise ParseError(f"unexpected token {tok!r} in word {text!r}")

    return Word(gens, _reduce_letters(letters))


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __str__(self) -> str:
        rels = ", ".join(format_word(r) for r in self.relators)
        return f"<{', '.join(self.generators)} | {rels}>"


def make_presentation(generators, relator_texts) -> Presentation:
    gens = tuple(generators)
    if len(set(gens)) != len(gens):
        raise InputError(f"duplicate generator names in {gens}")
    for name in gens:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise InputError(f"bad generator name {name!r}")
    relators = []
    for text in relator_texts:
        r = parse_word(text, gens) if isinstance(text, str) else free_reduce(text)
        if not r.letters:
            raise InputError(f"relator {text!r} is empty after free reduction")
        relators.append(r)
    return Presentation(gens, tuple(relators))


def parse_presentation(text: str) -> Presentation:
    """Parse '<a, b | a b a^-1 b^-1, a^2>'; the relator part may be absent."""
    m = re.fullmatch(r"\s*<(.*)>\s*", text, re.S)
    if not m:
        raise ParseError(f"presentation must be wrapped in <...>: {text!r}")
    inside = m.group(1)
    if "|" in inside:
        gen_part, _, rel_part = inside.partition("|")
    else:
        gen_part, rel_part = inside, ""
    gens = tuple(t.strip() for t in gen_part.split(",") if t.strip())
    if not gens:
        raise ParseError(f"no generators in {text!r}")
    rel_texts = [t.strip() for t in rel_part.split(",") if t.strip()]
    return make_presentation(gens, rel_texts)


# ------------------------------------------------------------------ verdicts

class OracleVerdict(enum.Enum):
    TRIVIAL = "trivial"
    NONTRIVIAL = "nontrivial"
    UNDECIDED = "undecided"


# ------------------------------------------------- abelianization arithmetic

def exponent_vector(w: Word) -> tuple[int, ...]:
    v = [0] * len(w.gens)
    for g, s in w.letters:
        v[g] += s
    return tuple(v)


def _ext_gcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


class IntegerLattice:
    """Row lattice of integer vectors with canonical coset residues.

    Basis kept in echelon form (strictly increasing pivot columns, positive
    pivots), built by unimodular row operations, so residue() is a sound and
    canonical invariant of the coset: equal group elements always share it.
    """

    def __init__(self, rows, width: int):
        self.width = width
        self.pivots: dict[int, list[int]] = {}
        for row in rows:
            self._insert(list(row))

    def _insert(self, v: list[int]):
        for col in range(self.width):
            if v[col] == 0:
                continue
            if col in self.pivots:
                a = self.pivots[col]
                g, x, y = _ext_gcd(a[col], v[col])
                na = [x * ai + y * vi for ai, vi in zip(a, v)]
                nv = [(a[col] // g) * vi - (v[col] // g) * ai for ai, vi in zip(a, v)]
                self.pivots[col] = na
                v = nv
            else:
                if v[col] < 0:
                    v = [-t for t in v]
                self.pivots[col] = v
                return

    def residue(self, vec) -> tuple[int, ...]:
        v = list(vec)
        for col in sorted(self.pivots):
            p = self.pivots[col]
            q = v[col] // p[col]
            if q:
                v = [vi - q * pi for vi, pi in zip(v, p)]
        return tuple(v)


# -------------------------------------------------------------------- oracles

class WordOracle:
    """Interface: answer whether a word is trivial in the presented group."""

    kind = "abstract"
    has_normal_forms = False
    # normal forms realize shortest spellings (length of normalize(w) is the
    # word-metric distance from the identity); lets callers use lengths as
    # exact distances
    geodesic_normal_forms = False

    def __init__(self, presentation: Presentation):
        self.presentation = presentation

    @property
    def name(self) -> str:
        return self.kind

    def is_trivial(self, w: Word) -> OracleVerdict:
        raise NotImplementedError

    def normalize(self, w: Word) -> Word:
        raise NotImplementedError(f"{self.kind} oracle has no normal forms")

    def invariant_key(self, w: Word):
        """Cheap sound invariant: equal elements share the key.  None = none."""
        return None


def is_trivial(oracle: WordOracle, w: Word) -> OracleVerdict:
    return oracle.is_trivial(w)


def words_equal(oracle: WordOracle, w1: Word, w2: Word) -> OracleVerdict:
    return oracle.is_trivial(compose(invert(w1), w2))


class FreeOracle(WordOracle):
    """Sound when the presentation has no relators: trivial = reduces to empty."""

    kind = "free"
    has_normal_forms = True
    geodesic_normal_forms = True

    def is_trivial(self, w: Word) -> OracleVerdict:
        if free_reduce(w).letters:
            return OracleVerdict.NONTRIVIAL
        return OracleVerdict.TRIVIAL

    def normalize(self, w: Word) -> Word:
        return free_reduce(w)

    def invariant_key(self, w: Word):
        return free_reduce(w).letters


class FreeAbelianOracle(WordOracle):
    """Sound when the group is free abelian on the generators."""

    kind = "abelian"
    has_normal_forms = True
    geodesic_normal_forms = True

    def is_trivial(self, w: Word) -> OracleVerdict:
        if any(exponent_vector(w)):
            return OracleVerdict.NONTRIVIAL
        return OracleVerdict.TRIVIAL

    def normalize(self, w: Word) -> Word:
        letters = []
        for g, e in enumerate(exponent_vector(w)):
            s = 1 if e > 0 else -1
            letters.extend([(g, s)] * abs(e))
        return Word(w.gens, tuple(letters))

    def invariant_key(self, w: Word):
        return exponent_vector(w)


class FiniteTableOracle(WordOracle):
    """Exact word problem from a finite multiplication table.

    elements: names; table[i][j] = index of elements[i] * elements[j];
    generator_map: generator name -> element index.  The table is checked to
    be a quasigroup with a two-sided identity under which every relator
    evaluates to the identity.
    """

    kind = "finite-table"
    has_normal_forms = True
    geodesic_normal_forms = True

    def __init__(self, presentation, elements, table, generator_map):
        super().__init__(presentation)
        self.elements = tuple(elements)
        n = len(self.elements)
        if len(table) != n or any(len(row) != n for row in table):
            raise InputError("multiplication table shape does not match elements")
        self.table = tuple(tuple(row) for row in table)
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise InputError("table row is not a permutation of the elements")
        for j in range(n):
            if sorted(row[j] for row in self.table) != list(range(n)):
                raise InputError("table column is not a permutation of the elements")
        ident = [e for e in range(n)
                 if all(self.table[e][j] == j for j in range(n))
                 and all(self.table[i][e] == i for i in range(n))]
        if len(ident) != 1:
            raise InputError("table has no two-sided identity")
        self.identity_index = ident[0]
        self.generator_map = dict(generator_map)
        for name in presentation.generators:
            if name not in self.generator_map:
                raise InputError(f"generator {name!r} missing from generator map")
            idx = self.generator_map[name]
            if not 0 <= idx < n:
                raise InputError(f"generator {name!r} maps outside the table")
        self._inverse = [0] * n
        for i in range(n):
            self._inverse[i] = self.table[i].index(self.identity_index)
        for r in presentation.relators:
            if self.evaluate(r) != self.identity_index:
                raise InputError(f"relator {format_word(r)} does not evaluate to identity")
        self._words = self._canonical_words()

    @property
    def name(self) -> str:
        payload = repr((self.elements, self.table, sorted(self.generator_map.items())))
        return "finite-table:" + hashlib.sha256(payload.encode()).hexdigest()[:12]

    def evaluate(self, w: Word) -> int:
        x = self.identity_index
        for g, s in w.letters:
            e = self.generator_map[w.gens[g]]
            x = self.table[x][e if s > 0 else self._inverse[e]]
        return x

    def _canonical_words(self):
        """Shortest word per element, shortlex tie-break, by ordered BFS."""
        gens = self.presentation.generators
        words = {self.identity_index: ()}
        queue = [self.identity_index]
        while queue:
            nxt = []
            for x in queue:
                base = words[x]
                for gi, name in enumerate(gens):
                    e = self.generator_map[name]
                    for s, col in ((1, e), (-1, self._inverse[e])):
                        y = self.table[x][col]
                        if y not in words:
                            words[y] = base + ((gi, s),)
                            nxt.append(y)
            queue = nxt
        if len(words) != len(self.elements):
            raise InputError("generators do not generate the whole table")
        return words

    def element_word(self, i: int) -> Word:
        return Word(self.presentation.generators, self._words[i])

    def is_trivial(self, w: Word) -> OracleVerdict:
        if self.evaluate(w) == self.identity_index:
            return OracleVerdict.TRIVIAL
        return OracleVerdict.NONTRIVIAL

    def normalize(self, w: Word) -> Word:
        return Word(w.gens, self._words[self.evaluate(w)])

    def invariant_key(self, w: Word):
        return self.evaluate(w)


class BoundedBFSOracle(WordOracle):
    """Bounded search of the relator-rewrite graph, shortest words first.

    A query word is explored by splicing in symmetrized relator forms (which
    subsumes deletion: inserting the inverse form next to an occurrence
    cancels it under free reduction), never exceeding the radius in reduced
    length.  Reaching the empty word proves Trivial.  Before searching, a
    sound abelianization certificate (exponent vector reduced modulo the
    relator exponent lattice) settles most Nontrivial queries outright.

    Exhausting the reachable component without finding the empty word is
    upgraded to Nontrivial only under the sufficiency gate: the radius used
    must cover the configured `sufficient_len` for this input (by default the
    rule radius >= max(2*len, 2*longest relator) serves as the gate).
    Everything else is Undecided, including node-cap exhaustion.

    radius=None computes a per-query radius from `policy`:
      "double": max(2*len, 2*maxrel)   (the default formula)
      "length": max(len, maxrel)       (for presentations where trivial words
                                        shorten monotonically; user assertion)
    Proven verdicts are memoized per instance and shared between queries:
    every word visited while proving w trivial (or exhausting its component)
    equals w in the group, so it inherits w's verdict.
    """

    kind = "bounded-bfs"

    def __init__(self, presentation, radius=None, policy="double",
                 sufficient_len="auto", node_cap=50000):
        super().__init__(presentation)
        if policy not in ("double", "length"):
            raise InputError(f"unknown radius policy {policy!r}")
        self.radius = radius
        self.policy = policy
        self.sufficient_len = sufficient_len
        self.node_cap = node_cap
        self.maxrel = max((len(r.letters) for r in presentation.relators), default=0)
        self._forms = self._symmetrized_forms()
        self._lattice = IntegerLattice(
            [exponent_vector(r) for r in presentation.relators],
            len(presentation.generators))
        self._known: dict[tuple, bool] = {}

    @property
    def name(self) -> str:
        return (f"bounded-bfs:radius={self.radius}:policy={self.policy}"
                f":sufficient={self.sufficient_len}:cap={self.node_cap}")

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_known"] = {}
        return state

    def _symmetrized_forms(self):
        forms = set()
        for r in self.presentation.relators:
            for base in (r.letters, tuple((g, -s) for g, s in reversed(r.letters))):
                for i in range(len(base)):
                    rot = _reduce_letters(base[i:] + base[:i])
                    if rot:
                        forms.add(rot)
        return tuple(sorted(forms))

    def invariant_key(self, w: Word):
        return self._lattice.residue(exponent_vector(w))

    def _radius_for(self, length: int) -> int:
        if self.radius is not None:
            return self.radius
        if self.policy == "double":
            return max(2 * length, 2 * self.maxrel)
        return max(length, self.maxrel)

    def _gate(self, length: int, r: int) -> bool:
        if self.sufficient_len == "all":
            return True
        if self.sufficient_len == "auto" or self.sufficient_len is None:
            return r >= max(2 * length, 2 * self.maxrel)
        return length <= int(self.sufficient_len)

    def is_trivial(self, w: Word) -> OracleVerdict:
        start = _reduce_letters(w.letters)
        if not start:
            return OracleVerdict.TRIVIAL
        if any(self._lattice.residue(exponent_vector(w))):
            return OracleVerdict.NONTRIVIAL
        r = self._radius_for(len(start))
        if len(start) > r:
            return OracleVerdict.UNDECIDED
        known = self._known.get(start)
        if known is not None:
            return OracleVerdict.TRIVIAL if known else OracleVerdict.NONTRIVIAL

        # shortest-first search toward the empty word
        counter = itertools.count()
        heap = [(len(start), next(counter), start)]
        visited = {start}
        pops = 0
        verdict = None
        while heap:
            pops += 1
            if pops > self.node_cap:
                return OracleVerdict.UNDECIDED
            _, _, u = heapq.heappop(heap)
            hit = self._known.get(u)
            if hit is None and not u:
                hit = True
            if hit is not None:
                verdict = hit
                break
            for form in self._forms:
                for i in range(len(u) + 1):
                    v = _concat_reduced(_concat_reduced(u[:i], form), u[i:])
                    if len(v) <= r and v not in visited:
                        visited.add(v)
                        heapq.heappush(heap, (len(v), next(counter), v))
        if verdict is None:
            # component exhausted without reaching the empty word
            if not self._gate(len(start), r):
                return OracleVerdict.UNDECIDED
            verdict = False
        for u in visited:
            self._known[u] = verdict
        return OracleVerdict.TRIVIAL if verdict else OracleVerdict.NONTRIVIAL


_ORACLE_KINDS = {
    "free": FreeOracle,
    "abelian": FreeAbelianOracle,
    "finite-table": FiniteTableOracle,
    "bounded-bfs": BoundedBFSOracle,
}


def oracle_from_config(presentation: Presentation, config: dict) -> WordOracle:
    """Build an oracle from its JSON configuration {"kind": ..., params}."""
    cfg = dict(config)
    kind = cfg.pop("kind", None)
    if kind == "free":
        return FreeOracle(presentation)
    if kind == "abelian":
        return FreeAbelianOracle(presentation)
    if kind == "finite-table":
        try:
            return FiniteTableOracle(presentation, cfg["elements"], cfg["table"],
                                     cfg["generator_map"])
        except KeyError as e:
            raise InputError(f"finite-table oracle config missing {e}") from None
    if kind == "bounded-bfs":
        known = {"radius", "policy", "sufficient_len", "node_cap"}
        bad = set(cfg) - known
        if bad:
            raise InputError(f"unknown bounded-bfs oracle options {sorted(bad)}")
        return BoundedBFSOracle(presentation, **cfg)
    raise InputError(f"unknown oracle kind {kind!r}")
