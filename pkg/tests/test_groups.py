import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from beauville.errors import BadInput, CapExceeded, UnsupportedQ
from beauville.groups import (AbelianSquared, IndexedGroup, PermGroup, SymmetricGroup, closure,
                              conjugacy_class_key, parse_group_spec)
from beauville.perm import Permutation
from beauville.psl2 import PSL2Group
from oracles import closure as brute_closure, compose, conjugacy_classes, perm_order, psl2_prime_classes

P = Permutation.from_cycles


def _partition_by_key(G, elems):
    groups = {}
    for g in elems:
        groups.setdefault(G.class_key(g), set()).add(tuple(G.to_perm(g).to_list()))
    return sorted(map(frozenset, groups.values()), key=sorted)


def _brute_partition(G):
    gens = [tuple(G.to_perm(g).to_list()) for g in G.generators()]
    elems = brute_closure(gens, G.degree)
    return sorted(map(frozenset, conjugacy_classes(elems)), key=sorted)


@pytest.mark.parametrize("spec", ["sn:4", "sn:5", "an:4", "an:5", "an:6", "an:7", "psl2:7", "psl2:8", "psl2:9"])
def test_class_keys_match_brute_conjugacy(spec):
    G = parse_group_spec(spec)
    assert _partition_by_key(G, G.elements()) == _brute_partition(G)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_psl2_class_keys_match_matrix_conjugacy(p):
    G = PSL2Group(p)
    brute = psl2_prime_classes(p)
    for cls in brute:
        keys = {G.class_key(G.matrix(*m)) for m in cls}
        assert len(keys) == 1
    reps = [G.class_key(G.matrix(*next(iter(cls)))) for cls in brute]
    assert len(set(reps)) == len(brute)


@pytest.mark.parametrize("spec,order", [("sn:5", 120), ("an:6", 360), ("psl2:7", 168), ("psl2:8", 504),
                                        ("psl2:9", 360), ("ab2:6", 36)])
def test_indexed_group(spec, order):
    G = parse_group_spec(spec)
    I = G.indexed
    assert I.size == G.order == order
    assert I.class_sizes.sum() == order
    assert I.class_of[0] == 0
    rng = np.random.default_rng(1)
    a = rng.integers(order, size=50)
    b = rng.integers(order, size=50)
    prod = I.mul(a, b)
    for x, y, z in zip(a, b, prod):
        px = tuple(G.to_perm(I.element(int(x))).to_list())
        py = tuple(G.to_perm(I.element(int(y))).to_list())
        assert compose(px, py) == tuple(G.to_perm(I.element(int(z))).to_list())
        assert I.orders[x] == perm_order(px)
        assert I.mul(int(x), int(I.inverse[x])) == 0
    for g in list(G.elements())[:30]:
        assert I.element(I.index_of(g)) == g


def test_closure_examples():
    S5 = SymmetricGroup(5)
    assert len(closure(S5, [P([[0, 1]], 5), P([[0, 1, 2, 3, 4]], 5)], 200)) == 120
    assert len(closure(S5, [P([[0, 1, 2]], 5)], 200)) == 3
    with pytest.raises(CapExceeded):
        closure(S5, [P([[0, 1]], 5), P([[0, 1, 2, 3, 4]], 5)], 100)
    G = PSL2Group(7)
    assert G.generated_order(G.generators()) == 168


def test_alternating_splits():
    A5 = SymmetricGroup(5, alternating=True)
    a = P([[0, 1, 2, 3, 4]], 5)
    b = a ** 2
    assert conjugacy_class_key(A5, a) != conjugacy_class_key(A5, b)
    S5 = SymmetricGroup(5)
    assert conjugacy_class_key(S5, a) == conjugacy_class_key(S5, b)


@given(st.integers(1, 30), st.tuples(st.integers(0, 100), st.integers(0, 100)),
       st.tuples(st.integers(0, 100), st.integers(0, 100)))
def test_ab2_properties(n, a, b):
    G = AbelianSquared(n)
    a, b = G.encode(a), G.encode(b)
    assert G.mul(a, b) == G.mul(b, a)
    assert G.is_identity(G.mul(a, G.inv(a)))
    assert G.element_order(a) == perm_order(tuple(G.to_perm(a).to_list()))
    assert G.from_perm(G.to_perm(a)) == a
    brute = len(brute_closure([tuple(G.to_perm(g).to_list()) for g in (a, b)], 2 * n))
    assert G.generated_order([a, b]) == brute


def test_group_specs():
    assert parse_group_spec("psl2:8").order == 504
    assert parse_group_spec("an:7").order == 2520
    assert parse_group_spec("ab2:5").order == 25
    for bad in ["psl2", "xx:4", "sn:abc"]:
        with pytest.raises(BadInput):
            parse_group_spec(bad)
    with pytest.raises(UnsupportedQ):
        parse_group_spec("psl2:6")


def test_perm_group_file(tmp_path):
    path = tmp_path / "m11.json"
    path.write_text(json.dumps({"degree": 11, "generators": ["(0 1 2 3 4 5 6 7 8 9 10)", "(2 6 10 7)(3 9 4 5)"]}))
    G = parse_group_spec(f"perm:{path}")
    assert isinstance(G, PermGroup)
    assert G.order == 7920


def test_json_round_trip():
    for spec in ["an:6", "psl2:9", "ab2:4"]:
        G = parse_group_spec(spec)
        rng = np.random.default_rng(0)
        for _ in range(10):
            g = G.random_element(rng)
            assert G.encode(G.from_json(G.to_json(g))) == G.encode(g)
    with pytest.raises(BadInput):
        SymmetricGroup(5, alternating=True).from_json("(0 1)")
