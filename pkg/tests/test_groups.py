import json

import pytest

from cohomkit.errors import ModulusMismatch, OrderCapExceeded
from cohomkit.exact.dense import IntMatrix
from cohomkit.groups import (BUILTIN_GROUPS, FiniteGroup, GroupRingElement,
                             builtin_group, cyclic, group_from_generators,
                             group_ring_multiply, klein_four, load_group_json,
                             quaternion_8, regular_action_matrix, symmetric_3)


class TestGroupFromGenerators:
    def test_transposition_gives_order_2(self):
        G = group_from_generators([(1, 0)])
        assert G.order == 2

    def test_three_cycle_gives_order_3(self):
        G = group_from_generators([(1, 2, 0)])
        assert G.order == 3

    def test_symmetric_group_on_three_letters(self):
        G = group_from_generators([(1, 0, 2), (1, 2, 0)])
        assert G.order == 6
        assert not G.is_abelian()

    def test_order_cap(self):
        # a 7-cycle and a transposition generate S_7 (order 5040)
        with pytest.raises(OrderCapExceeded):
            group_from_generators([(1, 2, 3, 4, 5, 6, 0), (1, 0, 2, 3, 4, 5, 6)])

    def test_bad_permutation_rejected(self):
        with pytest.raises(ValueError):
            group_from_generators([(0, 0, 1)])


class TestTableValidation:
    def test_non_latin_square_rejected(self):
        with pytest.raises(ValueError):
            FiniteGroup([[0, 1], [1, 1]])

    def test_non_associative_rejected(self):
        # Latin square with identity that fails associativity
        table = [[0, 1, 2, 3, 4],
                 [1, 0, 3, 4, 2],
                 [2, 4, 0, 1, 3],
                 [3, 2, 4, 0, 1],
                 [4, 3, 1, 2, 0]]
        with pytest.raises(ValueError):
            FiniteGroup(table)

    def test_inverses(self):
        G = symmetric_3()
        for a in range(G.order):
            assert G.mul(a, G.inv(a)) == 0
            assert G.mul(G.inv(a), a) == 0


class TestBuiltins:
    @pytest.mark.parametrize("name,order", [
        ("c2", 2), ("c3", 3), ("c4", 4), ("c6", 6), ("c8", 8),
        ("klein4", 4), ("s3", 6), ("q8", 8)])
    def test_orders(self, name, order):
        assert builtin_group(name).order == order

    def test_unknown_builtin(self):
        with pytest.raises(ValueError):
            builtin_group("m11")

    def test_klein_four_exponent_two(self):
        G = klein_four()
        assert all(G.mul(a, a) == 0 for a in range(4))

    def test_quaternion_structure(self):
        G = quaternion_8()
        orders = sorted(G.element_order(a) for a in range(8))
        assert orders == [1, 2, 4, 4, 4, 4, 4, 4]
        assert not G.is_abelian()

    def test_group_json_roundtrip(self, tmp_path):
        path = tmp_path / "s3.json"
        path.write_text(json.dumps(
            {"name": "s3", "generators": [[1, 0, 2], [1, 2, 0]]}))
        G = load_group_json(path)
        assert G.order == 6
        assert G.label == "s3"


class TestGroupRing:
    def test_one_plus_g_times_one_minus_g(self):
        G = cyclic(2)
        a = GroupRingElement(G, [1, 1])
        b = GroupRingElement(G, [1, -1])
        assert group_ring_multiply(a, b).coeffs == [0, 0]

    def test_identity_multiplication(self):
        G = symmetric_3()
        one = GroupRingElement.basis(G, 0)
        x = GroupRingElement(G, [1, 2, 3, 4, 5, 6])
        assert group_ring_multiply(one, x).coeffs == x.coeffs

    def test_square_of_one_plus_g(self):
        G = cyclic(2)
        a = GroupRingElement(G, [1, 1])
        assert group_ring_multiply(a, a).coeffs == [2, 2]

    def test_modulus_mismatch(self):
        G = cyclic(2)
        with pytest.raises(ModulusMismatch):
            group_ring_multiply(GroupRingElement(G, [1, 0], 2),
                                GroupRingElement(G, [1, 0], 3))

    def test_coefficients_reduced(self):
        G = cyclic(3)
        x = GroupRingElement(G, [5, -1, 7], modulus=3)
        assert x.coeffs == [2, 2, 1]


class TestRegularAction:
    def test_c2_generator_swap(self):
        G = cyclic(2)
        g = GroupRingElement.basis(G, 1)
        assert regular_action_matrix(g) == IntMatrix.from_rows(
            [[0, 1], [1, 0]])

    def test_identity_matrix(self):
        G = symmetric_3()
        e = GroupRingElement.basis(G, 0)
        assert regular_action_matrix(e) == IntMatrix.identity(6)

    def test_c3_generator_cycle(self):
        G = cyclic(3)
        g = GroupRingElement.basis(G, 1)
        M = regular_action_matrix(g)
        # permutation matrix of a 3-cycle
        assert sorted(M.entries) == [0] * 6 + [1] * 3
        assert (M @ M @ M) == IntMatrix.identity(3)

    @pytest.mark.parametrize("name", ["c2", "c4", "klein4", "s3", "q8"])
    def test_ring_homomorphism_on_basis(self, name):
        G = builtin_group(name)
        for a in range(G.order):
            for b in range(G.order):
                xa = GroupRingElement.basis(G, a)
                xb = GroupRingElement.basis(G, b)
                prod = group_ring_multiply(xa, xb)
                lhs = regular_action_matrix(prod)
                rhs = regular_action_matrix(xa) @ regular_action_matrix(xb)
                assert lhs == rhs
