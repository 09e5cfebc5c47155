import numpy as np
import pytest

from cohomkit.cohomology import cohomology_group
from cohomkit.errors import SizeCapExceeded
from cohomkit.exact.dense import IntMatrix
from cohomkit.fibrewise import field_free_resolution, regular_module, \
    trivial_module
from cohomkit.groups import cyclic, symmetric_3
from cohomkit.resolutions import (bar_cochains, bar_resolution,
                                  periodic_resolution_cyclic,
                                  subquotient_invariants, verify_complex)


class TestBarResolution:
    def test_c2_ranks_all_one(self):
        res = bar_resolution(cyclic(2), 3)
        assert res.ranks == [1, 1, 1, 1]

    def test_s3_ranks(self):
        res = bar_resolution(symmetric_3(), 3)
        assert res.ranks == [1, 5, 25, 125]

    @pytest.mark.parametrize("order", [2, 3, 4])
    def test_dd_zero_and_exactness(self, order):
        res = bar_resolution(cyclic(order), 4)
        rep = verify_complex(res)
        assert rep["pass"], rep

    def test_s3_complex_verifies(self):
        rep = verify_complex(bar_resolution(symmetric_3(), 3))
        assert rep["pass"], rep

    def test_degree0_homology_is_Z(self):
        # exactness report at degree 0 means ker(augmentation) = im(d_1)
        rep = verify_complex(bar_resolution(cyclic(2), 4))
        assert rep["exact"][0]

    def test_size_cap(self, monkeypatch):
        monkeypatch.setenv("COHOMKIT_SIZE_CAP", "100")
        with pytest.raises(SizeCapExceeded):
            bar_resolution(symmetric_3(), 4)


class TestPeriodicResolution:
    def test_dd_zero_via_norm(self):
        res = periodic_resolution_cyclic(2, 5)
        rep = verify_complex(res)
        assert all(rep["dd_zero"].values())

    def test_exact_in_positive_degrees(self):
        rep = verify_complex(periodic_resolution_cyclic(2, 6))
        assert rep["pass"], rep

    def test_corrupted_differential_detected(self):
        res = periodic_resolution_cyclic(3, 4)
        res.zg_diffs[2] = res.zg_diffs[2][:-1]  # drop one norm term
        rep = verify_complex(res)
        assert not rep["pass"]
        assert not (rep["dd_zero"].get(2, True) and rep["dd_zero"].get(3, True))

    @pytest.mark.parametrize("order", [2, 3, 4])
    @pytest.mark.parametrize("m", ["Z", 2, 3, 4])
    def test_cross_oracle_low_degrees(self, order, m, groups):
        """Bar cohomology equals periodic-resolution cohomology (small
        degrees here; the full range is acceptance criterion 1)."""
        G = groups[f"c{order}"]
        per = periodic_resolution_cyclic(order, 6)
        for n in range(0, 4):
            got = list(cohomology_group(G, m, n).invariant_factors)
            d_in = per.dual_differential(n) if n >= 1 else IntMatrix.zero(1, 1)
            d_out = per.dual_differential(n + 1)
            want = subquotient_invariants(d_in, d_out, m)
            assert sorted(got) == sorted(want), (order, m, n)


class TestFieldFreeResolution:
    def test_free_module_has_length_zero(self):
        M = regular_module(cyclic(2)).reduce_mod(2)
        assert field_free_resolution(M, 3).length == 0

    def test_trivial_module_over_F2C2(self):
        M = trivial_module(cyclic(2)).reduce_mod(2)
        res = field_free_resolution(M, 4)
        assert res.free_ranks == [1, 1, 1, 1, 1]
        # every differential is multiplication by (g - 1) = (g + 1) mod 2
        for mat in res.diffs:
            assert np.asarray(mat).tolist() == [[1, 1], [1, 1]]

    def test_zero_module_empty_resolution(self):
        from cohomkit.fibrewise import FpModule

        M = FpModule(cyclic(2), 2, [[], []])
        assert field_free_resolution(M, 3).length == 0

    def test_differentials_compose_to_zero(self):
        M = trivial_module(cyclic(3)).reduce_mod(3)
        res = field_free_resolution(M, 3)
        for a, b in zip(res.diffs, res.diffs[1:]):
            prod = (np.asarray(a, dtype=np.int64) @
                    np.asarray(b, dtype=np.int64)) % 3
            assert not prod.any()

    def test_cover_surjective_resolution_exact(self):
        # rank of each differential + next equals the free dimension
        from cohomkit.exact.modp import rank_modp

        M = trivial_module(cyclic(2)).reduce_mod(2)
        res = field_free_resolution(M, 4)
        dims = [2 * r for r in res.free_ranks]
        for t in range(1, len(res.diffs)):
            r1 = rank_modp(res.diffs[t - 1], 2)
            r2 = rank_modp(res.diffs[t], 2)
            assert r1 + r2 == dims[t], t


class TestBarCochains:
    def test_matvec_matches_dense_dual(self):
        G = symmetric_3()
        res = bar_resolution(G, 3)
        bc = bar_cochains(G)
        rng = np.random.default_rng(0)
        for n in (1, 2, 3):
            D = res.dual_differential(n)
            v = rng.integers(-3, 4, bc.rank(n - 1)).tolist()
            want = D.mul_vec(v)
            got = bc.matvec(n, v)
            assert got == want

    def test_dual_differentials_compose_to_zero(self):
        G = symmetric_3()
        bc = bar_cochains(G)
        rng = np.random.default_rng(1)
        v = rng.integers(-2, 3, bc.rank(2)).tolist()
        assert not any(bc.matvec(4, bc.matvec(3, v)))


class TestCochainComplex:
    def test_periodic_cochain_complex(self):
        from cohomkit.resolutions import CochainComplex

        cc = CochainComplex(periodic_resolution_cyclic(3, 5), 0)
        assert cc.verify_dd_zero()
        assert cc.cohomology_invariants(2) == [3]
        assert cc.cohomology_invariants(1) == []
        cc2 = CochainComplex(periodic_resolution_cyclic(2, 5), 2)
        assert cc2.verify_dd_zero()
        assert cc2.cohomology_invariants(3) == [2]

    def test_bar_cochain_complex_small(self):
        from cohomkit.resolutions import CochainComplex

        cc = CochainComplex(bar_resolution(cyclic(2), 4), 0)
        assert cc.verify_dd_zero()
        assert cc.cohomology_invariants(2) == [2]
