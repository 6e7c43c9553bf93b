import logging
from fractions import Fraction

import numpy as np
import pytest

from beauville.an_search import (build_ramification_structure, build_structure_an, choose_classes_an,
                                 choose_classes_sn, feasible_degrees)
from beauville.errors import BadType, DegreeTooSmall
from beauville.perm import Permutation, class_representative, fixed_point_count
from beauville.structures import is_ramification_structure, verify_structure


def _random_types(rng, length=3):
    while True:
        tau = tuple(int(m) for m in rng.integers(2, 16, length))
        if sum(1 - Fraction(1, m) for m in tau) > 2:
            return tau


def test_worked_example():
    sel = choose_classes_an((2, 3, 7), (2, 3, 7), 100)
    assert sel.sorted_m == (7, 7, 3, 3, 2, 2)
    assert sel.sorted_k == (14, 12, 32, 30, 50, 46)
    assert sel.sorted_f == (2, 16, 4, 10, 0, 8)


def test_selection_battery(caplog):
    rng = np.random.default_rng(2024)
    with caplog.at_level(logging.ERROR):
        for _ in range(1000):
            t1, t2 = _random_types(rng), _random_types(rng)
            m1 = max(t1 + t2)
            n = int(rng.integers(20 * m1, 20 * m1 + 2000))
            sel = choose_classes_an(t1, t2, n)
            shapes = sel.all_shapes()
            assert all(s.k % 2 == 0 and s.k >= 2 for s in shapes)
            assert len({s.k * s.m for s in shapes}) == len(shapes)
            assert all(0 <= s.f <= 12 * m1 and s.n == n for s in shapes)
            assert sel.signs() == (1, 1)


def test_selection_battery_symmetric():
    rng = np.random.default_rng(7)
    done = 0
    while done < 300:
        t1, t2 = _random_types(rng), _random_types(rng)
        if sum(m % 2 == 0 for m in t1) < 2 or sum(m % 2 == 0 for m in t2) < 2:
            continue
        m1 = max(t1 + t2)
        sel = choose_classes_sn(t1, t2, int(rng.integers(20 * m1, 20 * m1 + 2000)))
        for tau, tup in zip(sel.types, sel.shapes):
            assert sum(s.k % 2 for s in tup) == 2
            assert all(s.k % 2 == 0 for s, m in zip(tup, tau) if m % 2)
        assert sel.signs() == (1, 1)
        assert len({s.k * s.m for s in sel.all_shapes()}) == 6
        done += 1


def test_powers_of_selected_classes_keep_fixed_points():
    sel = choose_classes_an((2, 3, 7), (2, 3, 7), 100)
    for s in sel.all_shapes():
        g = class_representative(s)
        assert all(fixed_point_count(g ** l) == s.f for l in range(1, s.m))


def test_symmetric_mode_examples():
    sel = choose_classes_sn((4, 4, 5), (4, 4, 7), 112)
    assert [[s.k for s in tup] for tup in sel.shapes] == [[27, 25, 22], [23, 21, 16]]
    with pytest.raises(BadType) as exc:
        choose_classes_sn((2, 3, 7), (2, 3, 7), 200)
    assert exc.value.code == "too-few-even"


def test_type_errors():
    with pytest.raises(BadType) as exc:
        choose_classes_an((2, 3, 6), (2, 3, 7), 200)
    assert exc.value.code == "not-hyperbolic"
    with pytest.raises(BadType):
        choose_classes_an((1, 3, 7), (2, 3, 7), 200)
    with pytest.raises(BadType):
        build_structure_an((3, 3, 3, 3), (2, 3, 7), 800)


def test_degree_floor():
    with pytest.raises(DegreeTooSmall):
        build_structure_an((2, 3, 7), (2, 3, 7), 50)
    with pytest.raises(DegreeTooSmall):
        choose_classes_an((2, 3, 7), (2, 3, 7), 700, min_degree_factor=100)
    with pytest.raises(DegreeTooSmall):
        choose_classes_an((2, 3, 7), (2, 3, 7), 10)


def test_feasible_degrees():
    assert feasible_degrees([(2, 3, 7), (2, 3, 7)], 141, 512) == []
    assert feasible_degrees([(3, 3, 4), (5, 5, 5)], 81, 110) == [104, 105, 106, 108, 109, 110]
    for n in (103, 104):
        sel = choose_classes_an((3, 3, 4), (5, 5, 5), n)
        index = [sum(n - s.k - s.f for s in tup) for tup in sel.shapes]
        assert sel.is_transitive_feasible() == all(i >= 2 * n - 2 and i % 2 == 0 for i in index)


def test_build_alternating():
    s = build_structure_an((3, 3, 4), (5, 5, 5), 104, min_degree_factor=20)
    assert s.types == ((3, 3, 4), (5, 5, 5))
    assert s.group.spec == "an:104"
    assert verify_structure(s).valid is True
    sel = choose_classes_an((3, 3, 4), (5, 5, 5), 104)
    for tup, shapes in zip((s.T1, s.T2), sel.shapes):
        assert all(sh.matches(g) for g, sh in zip(tup.elements, shapes))


def test_build_symmetric():
    s = build_structure_an((4, 4, 5), (4, 4, 7), 112, mode="S_n", min_degree_factor=15)
    assert s.group.spec == "sn:112"
    assert any(g.sign() == -1 for g in s.T1.elements)
    assert verify_structure(s).valid is True


def test_build_is_deterministic():
    a = build_structure_an((3, 3, 4), (5, 5, 5), 104, seed=5, min_degree_factor=20)
    b = build_structure_an((3, 3, 4), (5, 5, 5), 104, seed=5, min_degree_factor=20)
    assert [g.to_list() for g in a.T1.elements] == [g.to_list() for g in b.T1.elements]


def test_ramification_structure_with_four_entries():
    s = build_ramification_structure((3, 3, 3, 3), (5, 5, 5), 60, min_degree_factor=None)
    assert s.types == ((3, 3, 3, 3), (5, 5, 5))
    assert is_ramification_structure(s.group, s.T1.elements, s.T2.elements).valid
    prod = Permutation.identity(60)
    for g in s.T1.elements:
        prod = prod * g
    assert prod.is_identity()
