import itertools
import math

import pytest

from beauville.errors import BadInput, BadType, UnsupportedP
from beauville.gf import make_field
from beauville.psl2 import (PSL2Group, beauville_psl2, beauville_psl2p_typed, element_kind, generates_psl2,
                            is_singular, is_small, ord_of_trace, solve_trace_triple, traces_of_order,
                            unipotent_triple)
from beauville.structures import verify_structure
from oracles import is_prime_trial, mat_mul, projective_order, sl2_elements

PRIME_POWERS_64 = [q for q in range(2, 65)
                   if any(is_prime_trial(p) and p ** round(math.log(q, p)) == q for p in range(2, q + 1))]


def _field(q):
    for p in range(2, q + 1):
        if is_prime_trial(p):
            e = round(math.log(q, p))
            if p**e == q:
                return make_field(p, e)
    raise AssertionError


def test_ord_of_trace_examples():
    F = make_field(7)
    assert ord_of_trace(F, 0) == 2
    assert ord_of_trace(F, 1) == ord_of_trace(F, 6) == 3
    assert ord_of_trace(F, 2) == ord_of_trace(F, 5) == 7
    assert ord_of_trace(F, 3) == ord_of_trace(F, 4) == 4


def test_traces_of_order_examples():
    F = make_field(7)
    assert [int(a) for a in traces_of_order(F, 7)] == [2, 5]
    assert [int(a) for a in traces_of_order(F, 2)] == [0]
    assert traces_of_order(F, 5) == []


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_ord_of_trace_matches_brute(p):
    F = make_field(p)
    by_trace = {}
    for m in sl2_elements(p):
        if m[1] == m[2] == 0 and m[0] == m[3] and m[0] in (1, p - 1):
            continue
        by_trace.setdefault((m[0] + m[3]) % p, set()).add(projective_order(m, p))
    for t, orders in by_trace.items():
        assert orders == {ord_of_trace(F, t)}


@pytest.mark.parametrize("q", PRIME_POWERS_64)
def test_orders_divide_the_element_types(q):
    F = _field(q)
    d = math.gcd(2, q - 1)
    for a in range(q):
        o = ord_of_trace(F, _elt(F, a))
        assert F.p % o == 0 or ((q - 1) // d) % o == 0 or ((q + 1) // d) % o == 0


def _elt(F, code):
    from beauville.gf import FieldElement
    return FieldElement(F, code)


def test_is_singular_examples():
    F = make_field(7)
    assert is_singular(F(2), F(2), F(2))
    assert not is_singular(F(0), F(0), F(0))
    F2 = make_field(2, 3)
    assert is_singular(F2(0), F2(0), F2(0))


@pytest.mark.parametrize("q", [q for q in range(3, 102, 2) if q in PRIME_POWERS_64 or
                               (is_prime_trial(q)) or q in (81,)])
def test_singular_diagonal_factorises(q):
    F = _field(q)
    for a in range(q):
        x = _elt(F, a)
        assert is_singular(x, x, x) == ((x - 2) * (x - 2) * (x + 1) == 0)


def test_is_small():
    F = make_field(7)
    assert is_small(F(0), F(0), F(3))
    assert is_small(F(0), F(1), F(3))
    assert not is_small(F(2), F(2), F(5))


@pytest.mark.parametrize("q", [2, 3, 5, 7, 11, 13])
def test_solve_trace_triple_prime_fields(q):
    F = make_field(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        A, B, C = solve_trace_triple(F, a, b, c).sl
        assert (A[0] + A[3]) % q == a and (B[0] + B[3]) % q == b and (C[0] + C[3]) % q == c
        assert mat_mul(mat_mul(A, B, q), C, q) == (1 % q, 0, 0, 1 % q)


@pytest.mark.parametrize("q", [4, 8, 9])
def test_solve_trace_triple_prime_powers(q):
    F = _field(q)
    for a, b, c in itertools.product(range(q), repeat=3):
        tri = solve_trace_triple(F, _elt(F, a), _elt(F, b), _elt(F, c))
        assert (tri.A * tri.B * tri.C).is_identity()
        for M, t in zip(tri.sl, (a, b, c)):
            assert F.add(M[0], M[3]) == t
            assert F.sub(F.mul(M[0], M[3]), F.mul(M[1], M[2])) == 1


def test_solve_trace_triple_examples():
    F = make_field(7)
    tri = solve_trace_triple(F, 2, 2, 5)
    assert [m.order() for m in tri[:3]] == [7, 7, 7]
    assert all(element_kind(m).tag == "unipotent" for m in tri[:3])
    tri = solve_trace_triple(F, 2, 2, 2)
    assert all(m.is_identity() or element_kind(m).tag == "unipotent" for m in tri[:3])


def test_element_kinds():
    G = PSL2Group(7)
    assert element_kind(G.identity()).tag == "central"
    assert element_kind(G.matrix(1, 1, 0, 1)).tag == "unipotent"
    assert element_kind(G.matrix(3, 0, 0, 5)).tag == "split"
    assert element_kind(G.matrix(0, 6, 1, 0)).tag == "nonsplit"


def test_generates_psl2():
    G = PSL2Group(7)
    ok, w = generates_psl2(G.matrix(1, 1, 0, 1), G.matrix(1, 0, 1, 1))
    assert ok and w["subgroup_order"] == 168
    ok, w = generates_psl2(G.matrix(1, 1, 0, 1), G.matrix(3, 0, 0, 5))
    assert ok is False and w["subgroup_order"] == 21
    ok, _ = generates_psl2(G.identity(), G.identity())
    assert ok is False
    with pytest.raises(BadInput):
        generates_psl2(G.identity(), G.identity(), 11)
    s = beauville_psl2(7)
    ok, w = generates_psl2(*s.T1.elements[:2])
    assert ok and w["method"] == "closure" and w["subgroup_order"] == 168


@pytest.mark.parametrize("q,types", [(7, ((4, 4, 4), (7, 7, 7))), (8, ((7, 7, 7), (9, 9, 9))),
                                     (9, ((4, 4, 4), (5, 5, 5))), (11, ((5, 5, 5), (6, 6, 6))),
                                     (13, ((6, 6, 6), (7, 7, 7))), (16, ((15, 15, 15), (17, 17, 17))),
                                     (25, ((12, 12, 12), (13, 13, 13)))])
def test_beauville_psl2_types(q, types):
    s = beauville_psl2(q)
    assert s.types == types
    assert verify_structure(s).valid is True


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_beauville_psl2_none(q):
    assert beauville_psl2(q) is None


@pytest.mark.parametrize("p,order", [(7, 168), (13, 1092)])
def test_unipotent_triple(p, order):
    tri = unipotent_triple(p)
    assert [m.order() for m in tri[:3]] == [p, p, p]
    ok, w = generates_psl2(tri.A, tri.B)
    assert ok and w["subgroup_order"] == order


def test_unipotent_triple_rejects_small():
    with pytest.raises(UnsupportedP):
        unipotent_triple(5)


def test_typed_structures():
    s = beauville_psl2p_typed(43, 7, 11)
    assert s.types == ((7, 7, 7), (11, 11, 11))
    s = beauville_psl2p_typed(13, 7, 13)
    assert s.types == ((7, 7, 7), (13, 13, 13))
    assert [int(m.trace) in (2, 11) for m in s.T2.elements] == [True] * 3


@pytest.mark.parametrize("args,code", [((43, 6, 10), "not-coprime"), ((43, 5, 11), "order-too-small"),
                                       ((43, 7, 13), "order-not-dividing"), ((45, 7, 11), "bad-prime")])
def test_typed_rejections(args, code):
    with pytest.raises(BadType) as exc:
        beauville_psl2p_typed(*args)
    assert exc.value.code == code
