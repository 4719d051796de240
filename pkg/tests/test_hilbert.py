import numpy as np
import pytest

from dicke_qb.hilbert import (
    a_op,
    adag_op,
    build_space,
    index_of,
    j2_op,
    jm_op,
    jp_op,
    jx_op,
    jz_op,
    n_op,
    state_of,
)


def comm(x, y):
    return x @ y - y @ x


class TestBuildSpace:
    @pytest.mark.parametrize(
        "n_tls, factor, dim",
        [(10, 4, 451), (1, 1, 4), (30, 4, 3751), (2, 3, 21)],
    )
    def test_dimensions(self, n_tls, factor, dim):
        space = build_space(n_tls, factor)
        assert space.dim == dim
        assert space.n_ph_max == factor * n_tls
        assert space.j == n_tls / 2

    def test_memory_guard(self):
        with pytest.raises(ValueError, match="memory guard"):
            build_space(100, 10)
        # explicit override admits the same space
        space = build_space(100, 10, max_dim=1_000_000)
        assert space.dim == 101 * 1001

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_rejects_bad_n_tls(self, bad):
        with pytest.raises(ValueError):
            build_space(bad)

    def test_rejects_bad_cutoff(self):
        with pytest.raises(ValueError):
            build_space(4, 0)


class TestIndexing:
    def test_round_trip_bijection(self):
        space = build_space(3, 2)
        seen = set()
        for idx in range(space.dim):
            n, m = state_of(space, idx)
            assert index_of(space, n, m) == idx
            seen.add((n, m))
        assert len(seen) == space.dim

    def test_ordering_convention(self):
        space = build_space(5, 4)
        assert index_of(space, 0, -space.j) == 0
        assert index_of(space, space.n_ph_max, space.j) == space.dim - 1

    def test_out_of_range(self):
        space = build_space(2, 2)
        with pytest.raises(ValueError):
            index_of(space, -1, 0.0)
        with pytest.raises(ValueError):
            index_of(space, space.n_ph_max + 1, 0.0)
        with pytest.raises(ValueError):
            index_of(space, 0, space.j + 1)
        with pytest.raises(ValueError):
            index_of(space, 0, 0.5)  # N=2 has integer m only
        with pytest.raises(ValueError):
            state_of(space, space.dim)


class TestPhotonOperators:
    def test_annihilation_column(self):
        space = build_space(2, 3)
        a = a_op(space)
        col = a[:, index_of(space, 3, 0.0)]
        expected = np.zeros(space.dim)
        expected[index_of(space, 2, 0.0)] = np.sqrt(3)
        assert np.allclose(col, expected, atol=1e-15)

    def test_vacuum_annihilates(self):
        space = build_space(2, 2)
        a = a_op(space)
        for m in (-1.0, 0.0, 1.0):
            assert not a[:, index_of(space, 0, m)].any()

    def test_adag_is_transpose(self):
        space = build_space(3, 2)
        assert np.array_equal(adag_op(space), a_op(space).T)

    def test_number_operator_diagonal(self):
        space = build_space(2, 4)
        product = adag_op(space) @ a_op(space)
        expected = np.repeat(np.arange(space.n_ph_max + 1, dtype=float), space.n_spin)
        assert np.allclose(np.diag(product), expected, atol=1e-14)
        assert np.allclose(product, n_op(space), atol=1e-14)

    def test_boson_commutator_below_cutoff(self):
        space = build_space(2, 3)
        c = comm(a_op(space), adag_op(space))
        k = space.n_ph_max * space.n_spin  # all columns with n < n_ph_max
        assert np.allclose(c[:k, :k], np.eye(k), atol=1e-14)
        # truncation artifact confined to the cutoff sector
        top = index_of(space, space.n_ph_max, -space.j)
        assert c[top, top] == pytest.approx(-space.n_ph_max)


class TestSpinOperators:
    def test_ladder_value_n2(self):
        space = build_space(2, 1)
        jp = jp_op(space)
        assert jp[index_of(space, 0, 1.0), index_of(space, 0, 0.0)] == pytest.approx(np.sqrt(2))

    def test_highest_weight_annihilated(self):
        space = build_space(4, 1)
        jp = jp_op(space)
        assert not jp[:, index_of(space, 0, space.j)].any()

    def test_jz_diagonal(self):
        space = build_space(10, 1)
        diag = np.diag(jz_op(space))
        assert diag.min() == -5.0 and diag.max() == 5.0

    @pytest.mark.parametrize("n_tls", [1, 2, 3, 7])
    def test_su2_algebra(self, n_tls):
        space = build_space(n_tls, 2)
        jp, jm, jz = jp_op(space), jm_op(space), jz_op(space)
        assert np.max(np.abs(comm(jp, jm) - 2 * jz)) <= 1e-12
        assert np.max(np.abs(comm(jz, jp) - jp)) <= 1e-12
        assert np.max(np.abs(comm(jz, jm) + jm)) <= 1e-12

    def test_jx_symmetric(self):
        space = build_space(3, 2)
        jx = jx_op(space)
        assert np.array_equal(jx, jx.T)

    @pytest.mark.parametrize("n_tls", [1, 2, 5])
    def test_casimir_is_scalar(self, n_tls):
        space = build_space(n_tls, 2)
        j = space.j
        assert np.max(np.abs(j2_op(space) - j * (j + 1) * np.eye(space.dim))) <= 1e-12

    def test_all_real_float64(self):
        space = build_space(2, 2)
        for op in (a_op, adag_op, jz_op, jp_op, jm_op, jx_op, j2_op, n_op):
            assert op(space).dtype == np.float64
