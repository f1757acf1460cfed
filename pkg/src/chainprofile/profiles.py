"""Filling volumes and isoperimetric profiles.

The filling search runs iterative deepening on the filling norm: a minimal
filling splits into connected components, each with nonzero boundary that is
a subchain of the target cycle, so fillings of norm v are sums of connected
chains drawn from the enumeration pool, placed by translation.  Each search
node branches on which component covers the least remaining boundary cell,
which some component always must.  Witnesses are re-verified against the
boundary operator before anything is returned.

Profiles: psi(n) maximizes filling volume over connected cycles of norm at
most n; phi(n) maximizes the sum of psi over partitions of n, computed by
the standard recurrence.  Finite presentations backed by a multiplication
table use the exact finite sweep instead and the two routes refuse each
other's inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from multiprocessing import get_context

from .enumeration import (
    _unit_boundary_norm,
    connected_cycles_up_to_action,
    reachable_chains,
)
from .errors import (
    BudgetExceededError,
    ChainProfileError,
    InputError,
    WrongAlgorithmError,
)
from .skeleton import (
    Chain,
    add_chains,
    boundary,
    chain_to_json,
    chains_equal,
    is_connected,
    is_subchain,
    negate,
    norm,
    skeleton_fingerprint,
    translate,
    zero_chain,
)
from .words import compose, invert


@dataclass
class Budget:
    """Caps for the exhaustive parts of the computation."""
    fill_volume_cap: int = 24
    node_cap: int = 1_000_000

    def to_json_dict(self) -> dict:
        return {"fill_volume_cap": self.fill_volume_cap, "node_cap": self.node_cap}


@dataclass
class ProfileTable:
    """Values 0..n of one profile plus the certificates that produced them."""
    kind: str
    fingerprint: str
    budget: dict
    values: list
    witnesses: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "fingerprint": self.fingerprint,
                "budget": self.budget, "values": self.values,
                "witnesses": self.witnesses}


# ------------------------------------------------------------- filling search

class _PoolRep:
    """One connected chain with its boundary, indexed for anchor lookups."""
    __slots__ = ("chain", "bnd", "anchors")

    def __init__(self, chain, bnd):
        self.chain = chain
        self.bnd = bnd
        self.anchors = {}
        for c, n in bnd.terms:
            key = (c.base, 1 if n > 0 else -1)
            self.anchors.setdefault(key, []).append((c.word, n))


class _ComponentPool:
    """Connected chains with nonzero boundary, one per orbit, grown lazily."""

    def __init__(self, s, oracle, dim, node_cap):
        self.s = s
        self.oracle = oracle
        self.dim = dim
        self.node_cap = node_cap
        self.upto = 0
        self.by_norm = {}

    def ensure(self, v: int):
        if v <= self.upto:
            return
        reached = reachable_chains(self.s, self.oracle, self.dim, v,
                                   node_cap=self.node_cap)
        self.by_norm = {}
        for n, pairs in reached.items():
            keep = []
            for a, b in pairs:
                if b.terms and is_connected(a, self.s, self.oracle):
                    keep.append(_PoolRep(a, b))
            self.by_norm[n] = keep
        self.upto = v


def minimal_filling(cycle: Chain, s, oracle, budget: Budget | None = None,
                    pool: _ComponentPool | None = None) -> Chain:
    """A filling of least norm: T one dimension up with boundary the cycle."""
    budget = budget or Budget()
    dim = cycle.dim + 1
    if dim > s.q:
        raise InputError(f"cycles of dimension {cycle.dim} have no fillings "
                         f"in a {s.q}-dimensional complex")
    if cycle.dim >= 1 and boundary(cycle, s, oracle).terms:
        raise InputError("filling target is not a cycle")
    if not cycle.terms:
        return zero_chain(dim)
    if pool is None:
        pool = _ComponentPool(s, oracle, dim, budget.node_cap)
    beta = _unit_boundary_norm(s, dim)
    if beta == 0:
        raise InputError("no cells available one dimension up")
    nodes = [0]

    def search(target, rem):
        # branch on which component covers the least remaining support cell:
        # some component must, with a same-sign coefficient there
        nodes[0] += 1
        if nodes[0] > budget.node_cap:
            raise BudgetExceededError(
                f"filling search expanded more than {budget.node_cap} nodes")
        tn = norm(target)
        if tn == 0:
            return [] if rem == 0 else None
        if tn > rem * beta:
            return None
        x, cx = target.terms[0]
        want = (x.base, 1 if cx > 0 else -1)
        for size in range(min(rem, pool.upto), 0, -1):
            for rep in pool.by_norm.get(size, ()):
                for bw, bc in rep.anchors.get(want, ()):
                    if abs(bc) > abs(cx):
                        continue
                    g = compose(x.word, invert(bw))
                    placed_b = translate(g, rep.bnd, oracle)
                    if not is_subchain(placed_b, target, oracle):
                        continue
                    rest = add_chains(target, negate(placed_b), oracle)
                    tail = search(rest, rem - size)
                    if tail is not None:
                        return [(rep.chain, g)] + tail
        return None

    low = max(1, -(-norm(cycle) // beta))
    for v in range(low, budget.fill_volume_cap + 1):
        pool.ensure(v)
        found = search(cycle, v)
        if found is not None:
            total = zero_chain(dim)
            for rep, g in found:
                total = add_chains(total, translate(g, rep, oracle), oracle)
            if not chains_equal(boundary(total, s, oracle), cycle, oracle):
                raise ChainProfileError("filling witness failed verification")
            return total
    raise BudgetExceededError(
        f"no filling of norm at most {budget.fill_volume_cap} found")


def filling_volume(cycle: Chain, s, oracle, budget: Budget | None = None,
                   pool: _ComponentPool | None = None) -> int:
    return norm(minimal_filling(cycle, s, oracle, budget=budget, pool=pool))


# ------------------------------------------------------- psi and phi profiles

_WORKER_STATE: dict = {}


def _fv_init(s, oracle, budget):
    _WORKER_STATE["s"] = s
    _WORKER_STATE["oracle"] = oracle
    _WORKER_STATE["budget"] = budget
    _WORKER_STATE["pool"] = None


def _fv_task(cycle: Chain):
    s = _WORKER_STATE["s"]
    oracle = _WORKER_STATE["oracle"]
    budget = _WORKER_STATE["budget"]
    if _WORKER_STATE["pool"] is None:
        _WORKER_STATE["pool"] = _ComponentPool(s, oracle, cycle.dim + 1,
                                               budget.node_cap)
    filling = minimal_filling(cycle, s, oracle, budget=budget,
                              pool=_WORKER_STATE["pool"])
    return norm(filling), filling


def _check_infinite_route(oracle):
    if getattr(oracle, "kind", None) == "finite-table":
        raise WrongAlgorithmError(
            "the cover of a finite presentation is finite; use the exact "
            "finite profile instead of the enumeration profiles")


def psi_table(s, oracle, n: int, budget: Budget | None = None,
              workers: int = 1) -> ProfileTable:
    """psi(k) for k = 0..n: largest filling volume over connected cycles of
    norm at most k one dimension below the top."""
    _check_infinite_route(oracle)
    budget = budget or Budget()
    if n < 0:
        raise InputError("profile length must be nonnegative")
    dim = s.q - 1
    cycles = connected_cycles_up_to_action(s, oracle, dim, n,
                                           node_cap=budget.node_cap) if n else {}
    flat = [(k, a) for k in sorted(cycles) for a in cycles[k]]
    if workers > 1 and len(flat) > 1:
        ctx = get_context("fork")
        with ctx.Pool(workers, initializer=_fv_init,
                      initargs=(s, oracle, budget)) as p:
            results = p.map(_fv_task, [a for _, a in flat])
    else:
        _fv_init(s, oracle, budget)
        results = [_fv_task(a) for _, a in flat]
        _WORKER_STATE.clear()
    values = [0] * (n + 1)
    witnesses = [None] * (n + 1)
    best, best_wit = 0, None
    i = 0
    for k in range(1, n + 1):
        while i < len(flat) and flat[i][0] <= k:
            vol, filling = results[i]
            if vol > best:
                best = vol
                best_wit = {"cycle": chain_to_json(flat[i][1], s),
                            "filling": chain_to_json(filling, s)}
            i += 1
        values[k] = best
        witnesses[k] = best_wit
    return ProfileTable("psi", skeleton_fingerprint(s, oracle),
                        budget.to_json_dict(), values, witnesses)


def _partition_recurrence(delta):
    """phi[j] = max over 1 <= k <= j of delta[k] + phi[j - k], phi[0] = 0."""
    n = len(delta) - 1
    phi = [0] * (n + 1)
    choice = [0] * (n + 1)
    for j in range(1, n + 1):
        best, arg = None, 0
        for k in range(1, j + 1):
            v = delta[k] + phi[j - k]
            if best is None or v > best:
                best, arg = v, k
        phi[j] = best
        choice[j] = arg
    return phi, choice


def _partition_of(choice, j):
    out = []
    while j > 0:
        out.append(choice[j])
        j -= choice[j]
    return sorted(out, reverse=True)


def phi_table(s, oracle, n: int, budget: Budget | None = None,
              workers: int = 1, psi: ProfileTable | None = None) -> ProfileTable:
    """phi(k) for k = 0..n via the partition recurrence over psi."""
    if psi is None:
        psi = psi_table(s, oracle, n, budget=budget, workers=workers)
    elif psi.kind != "psi" or len(psi.values) != n + 1:
        raise InputError("phi needs a psi table of matching length")
    values, choice = _partition_recurrence(psi.values)
    witnesses = [None] * (n + 1)
    for k in range(1, n + 1):
        witnesses[k] = {"partition": _partition_of(choice, k),
                        "psi": [psi.values[p] for p in _partition_of(choice, k)]}
    return ProfileTable("phi", psi.fingerprint, psi.budget, values, witnesses)


# ------------------------------------------------------- exact finite profile

def _finite_cells(s, oracle, dim):
    return [(e, base) for e in range(len(oracle.elements))
            for base in range(s.n_cells(dim))]


def _finite_unit_boundary(s, oracle, dim, elem, base):
    out = {}
    for bc, c in s.boundary_chain(dim, base).terms:
        y = oracle.table[elem][oracle.evaluate(bc.word)]
        key = (y, bc.base)
        out[key] = out.get(key, 0) + c
        if not out[key]:
            del out[key]
    return out


def _enumerate_chains(cells, unit_bnds, total):
    """All coefficient assignments of given total norm over the cells."""
    m = len(cells)

    def rec(i, left, acc, bnd):
        if i == m:
            if left == 0:
                yield dict(acc), dict(bnd)
            return
        if left == 0:
            yield dict(acc), dict(bnd)
            return
        # zero on this cell
        yield from rec(i + 1, left, acc, bnd)
        for mag in range(1, left + 1):
            for sign in (1, -1):
                acc[cells[i]] = mag * sign
                nb = dict(bnd)
                for cell, c in unit_bnds[i].items():
                    v = nb.get(cell, 0) + c * mag * sign
                    if v:
                        nb[cell] = v
                    else:
                        nb.pop(cell, None)
                yield from rec(i + 1, left - mag, acc, nb)
                del acc[cells[i]]

    yield from rec(0, total, {}, {})


def finite_profile(s, oracle, n: int, budget: Budget | None = None) -> ProfileTable:
    """Exact profile for a finite presentation: sweep fillings by norm and
    flag each cycle of the finite cover the first time its boundary shows up."""
    if getattr(oracle, "kind", None) != "finite-table":
        raise WrongAlgorithmError(
            "the exact finite profile needs a finite-table oracle")
    budget = budget or Budget()
    if n < 0:
        raise InputError("profile length must be nonnegative")
    dim = s.q - 1
    cyc_cells = _finite_cells(s, oracle, dim)
    cyc_bnds = [_finite_unit_boundary(s, oracle, dim, e, b) for e, b in cyc_cells]
    fill_cells = _finite_cells(s, oracle, s.q)
    fill_bnds = [_finite_unit_boundary(s, oracle, s.q, e, b) for e, b in fill_cells]

    def freeze(chain):
        return tuple(sorted(chain.items()))

    cycles = {}
    count = 0
    for total in range(n + 1):
        for chain, bnd in _enumerate_chains(cyc_cells, cyc_bnds, total):
            count += 1
            if count > budget.node_cap:
                raise BudgetExceededError(
                    f"finite cycle enumeration passed {budget.node_cap} chains")
            if not bnd:
                cycles[freeze(chain)] = total
    flagged = {}
    witness_fill = {}
    pending = set(cycles)
    for v in range(0, budget.fill_volume_cap + 1):
        if not pending:
            break
        for chain, bnd in _enumerate_chains(fill_cells, fill_bnds, v):
            count += 1
            if count > budget.node_cap:
                raise BudgetExceededError(
                    f"finite filling sweep passed {budget.node_cap} chains")
            key = freeze(bnd)
            if key in pending:
                flagged[key] = v
                witness_fill[key] = dict(chain)
                pending.discard(key)
                if not pending:
                    break
    if pending:
        raise BudgetExceededError(
            f"some cycles admit no filling of norm at most {budget.fill_volume_cap}")

    def cell_json(cell, d):
        e, base = cell
        return {"element": oracle.elements[e], "base": s.cell_id(d, base)}

    values = [0] * (n + 1)
    witnesses = [None] * (n + 1)
    best, best_key = 0, None
    by_norm = sorted(cycles.items(), key=lambda kv: (kv[1], kv[0]))
    i = 0
    for k in range(n + 1):
        while i < len(by_norm) and by_norm[i][1] <= k:
            key = by_norm[i][0]
            if flagged[key] > best:
                best, best_key = flagged[key], key
            i += 1
        values[k] = best
        if best_key is not None:
            witnesses[k] = {
                "cycle": [dict(cell_json(cell, dim), coeff=c)
                          for cell, c in best_key],
                "filling": [dict(cell_json(cell, s.q), coeff=c)
                            for cell, c in sorted(witness_fill[best_key].items())],
            }
    return ProfileTable("finite", skeleton_fingerprint(s, oracle),
                        budget.to_json_dict(), values, witnesses)


# ------------------------------------------------------------ combined bounds

def _check_delta(delta, expect_zero_start):
    vals = list(delta)
    if expect_zero_start:
        if not vals or vals[0] != 0:
            raise InputError("table must start with value 0 at size 0")
    for v in vals:
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise InputError(f"table entries must be nonnegative integers, got {v!r}")
    for a, b in zip(vals, vals[1:]):
        if b < a:
            raise InputError("table must be nondecreasing")
    return vals


def chain2_bound(delta) -> list:
    """Profile bound from a one-piece table: best sum over partitions.

    delta[k] bounds the worst filling volume of one connected cycle of norm
    at most k (delta[0] = 0); the result bounds the full profile.
    """
    vals = _check_delta(delta, expect_zero_start=True)
    phi, _ = _partition_recurrence(vals)
    return phi


def disk_combination(delta, parts: int) -> list:
    """Best sum of the table over exactly `parts` nonnegative sizes."""
    if parts < 1:
        raise InputError("number of parts must be at least 1")
    vals = _check_delta(delta, expect_zero_start=True)
    n = len(vals) - 1
    best = list(vals)
    for _ in range(parts - 1):
        nxt = []
        for j in range(n + 1):
            nxt.append(max(best[j - k] + vals[k] for k in range(j + 1)))
        best = nxt
    return best
