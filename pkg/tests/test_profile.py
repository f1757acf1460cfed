"""Filling volumes and profiles against the independent grid model."""

import random

import pytest
import window_oracle as win

from chainprofile.errors import BudgetExceededError, InputError, WrongAlgorithmError
from chainprofile.profiles import (
    Budget,
    chain2_bound,
    disk_combination,
    filling_volume,
    finite_profile,
    minimal_filling,
    phi_table,
    psi_table,
)
from chainprofile.skeleton import (
    LiftedCell,
    boundary,
    build_chain,
    chain_from_json,
    chains_equal,
    norm,
    presentation_complex,
    translate,
    zero_chain,
)
from chainprofile.words import (
    FiniteTableOracle,
    FreeAbelianOracle,
    FreeOracle,
    parse_presentation,
    parse_word,
)

GENS = ("a", "b")


def z2():
    oracle = FreeAbelianOracle(GENS)
    s = presentation_complex(parse_presentation("<a, b | a b a^-1 b^-1>"))
    return s, oracle


def face_chain(s, oracle, terms):
    pairs = [(LiftedCell(2, 0, parse_word(w, GENS)), n) for w, n in terms]
    return build_chain(2, pairs, oracle)


def square_cycle(s, oracle, base_word="1", scale=1):
    f = face_chain(s, oracle, [(base_word, scale)])
    return boundary(f, s, oracle)


def test_square_fills_with_one_face():
    s, oracle = z2()
    cyc = square_cycle(s, oracle)
    t = minimal_filling(cyc, s, oracle)
    assert norm(t) == 1
    assert chains_equal(boundary(t, s, oracle), cyc, oracle)
    assert filling_volume(cyc, s, oracle) == 1


def test_doubled_square_needs_two_faces():
    s, oracle = z2()
    assert filling_volume(square_cycle(s, oracle, scale=2), s, oracle) == 2


def test_domino_needs_two_faces():
    s, oracle = z2()
    f = face_chain(s, oracle, [("1", 1), ("a", 1)])
    cyc = boundary(f, s, oracle)
    assert norm(cyc) == 6
    assert filling_volume(cyc, s, oracle) == 2


def test_filling_volume_is_translation_invariant():
    s, oracle = z2()
    rng = random.Random(5)
    for _ in range(6):
        f = face_chain(s, oracle, [("1", 1), (rng.choice(["a", "b"]), 1)])
        cyc = boundary(f, s, oracle)
        g = parse_word(rng.choice(["a^2", "b^-3 a", "a b^2"]), GENS)
        assert (filling_volume(translate(g, cyc, oracle), s, oracle)
                == filling_volume(cyc, s, oracle))


def test_zero_cycle_fills_with_nothing():
    s, oracle = z2()
    assert filling_volume(zero_chain(1), s, oracle) == 0


def test_non_cycle_is_rejected():
    s, oracle = z2()
    idx = {s.cell_id(1, i): i for i in range(s.n_cells(1))}
    a = build_chain(1, [(LiftedCell(1, idx["e_a"], parse_word("1", GENS)), 1)], oracle)
    with pytest.raises(InputError):
        minimal_filling(a, s, oracle)


def test_tiny_cap_is_reported():
    s, oracle = z2()
    cyc = square_cycle(s, oracle, scale=3)
    with pytest.raises(BudgetExceededError):
        minimal_filling(cyc, s, oracle, budget=Budget(fill_volume_cap=2))


def test_psi_values_on_the_grid():
    s, oracle = z2()
    table = psi_table(s, oracle, 8)
    assert table.values == [0, 0, 0, 0, 1, 1, 2, 2, 4]
    assert table.kind == "psi"
    for n in (4, 6, 8):
        wit = table.witnesses[n]
        cyc = chain_from_json(wit["cycle"], s, oracle)
        fill = chain_from_json(wit["filling"], s, oracle)
        assert norm(cyc) <= n
        assert norm(fill) == table.values[n]
        assert chains_equal(boundary(fill, s, oracle), cyc, oracle)


def test_psi_matches_grid_model_small():
    s, oracle = z2()
    table = psi_table(s, oracle, 8)
    for n in (4, 6, 8):
        assert table.values[n] == win.z2_psi(n)


def test_worker_count_does_not_change_results():
    s, oracle = z2()
    one = psi_table(s, oracle, 6, workers=1)
    two = psi_table(s, oracle, 6, workers=2)
    assert one.values == two.values
    assert one.witnesses == two.witnesses


def test_phi_recurrence_on_the_grid():
    s, oracle = z2()
    table = phi_table(s, oracle, 8)
    assert table.values == [0, 0, 0, 0, 1, 1, 2, 2, 4]
    assert table.witnesses[8]["partition"] == [8]
    assert sum(table.witnesses[5]["partition"]) == 5


def test_phi_agrees_with_exhaustive_partitions():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 10)
        delta = [0]
        for _ in range(n):
            delta.append(delta[-1] + rng.randint(0, 3))
        ours = chain2_bound(delta)
        for j in range(n + 1):
            assert ours[j] == win.partition_max(delta, j)


def test_free_group_profiles_vanish():
    oracle = FreeOracle(GENS)
    s = presentation_complex(parse_presentation("<a, b |>"))
    assert psi_table(s, oracle, 8).values == [0] * 9
    assert phi_table(s, oracle, 8).values == [0] * 9


def test_finite_profile_of_order_two():
    p = parse_presentation("<a | a^2>")
    oracle = FiniteTableOracle(p, ["e", "a"], [[0, 1], [1, 0]], {"a": 1})
    s = presentation_complex(p)
    table = finite_profile(s, oracle, 6)
    assert table.values == [0, 0, 1, 1, 2, 2, 3]
    assert table.values == [win.zmod2_profile(n) for n in range(7)]
    wit = table.witnesses[6]
    assert sum(abs(t["coeff"]) for t in wit["filling"]) == 3


def test_algorithm_routing_is_strict():
    p = parse_presentation("<a | a^2>")
    oracle = FiniteTableOracle(p, ["e", "a"], [[0, 1], [1, 0]], {"a": 1})
    s = presentation_complex(p)
    with pytest.raises(WrongAlgorithmError):
        psi_table(s, oracle, 4)
    with pytest.raises(WrongAlgorithmError):
        phi_table(s, oracle, 4)
    sz, oz = z2()
    with pytest.raises(WrongAlgorithmError):
        finite_profile(sz, oz, 4)


def test_combination_table_validation():
    with pytest.raises(InputError):
        chain2_bound([1, 2, 3])
    with pytest.raises(InputError):
        chain2_bound([0, 2, 1])
    with pytest.raises(InputError):
        chain2_bound([0, 1, -1])
    with pytest.raises(InputError):
        chain2_bound([0, 1, 1.5])


def test_disk_combination_parts():
    assert disk_combination([0, 1, 1, 2, 3], 1) == [0, 1, 1, 2, 3]
    assert disk_combination([0, 1, 1, 2, 3], 2) == [0, 1, 2, 2, 3]
    assert disk_combination([0, 0, 1, 1, 2], 2)[4] == 2
    with pytest.raises(InputError):
        disk_combination([0, 1], 0)
