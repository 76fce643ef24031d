import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crossdiff.mesh_fe import (
    BandedSystem,
    Mesh,
    MeshMismatchError,
    NodalField,
    SingularSystemError,
    add_block,
    assemble_weighted_stiffness,
    element_gradient,
    interpolate,
    lumped_product,
    solve_banded,
    tridiag_to_dense,
)

unit3 = Mesh.uniform(0.0, 1.0, 3)


def random_mesh(draw_sizes):
    return Mesh(np.concatenate([[0.0], np.cumsum(draw_sizes)]))


sizes = st.lists(st.floats(0.1, 1.0), min_size=1, max_size=30)
values = st.floats(-10, 10).filter(lambda v: v == 0 or abs(v) > 1e-6)


class TestMesh:
    def test_rejects_unsorted_and_short(self):
        with pytest.raises(ValueError):
            Mesh([0.0, 1.0, 0.5])
        with pytest.raises(ValueError):
            Mesh([0.0])

    def test_lumped_weights(self):
        np.testing.assert_allclose(unit3.lumped_weights, [0.25, 0.5, 0.25])
        m = Mesh([0.0, 1.0, 3.0])
        np.testing.assert_allclose(m.lumped_weights, [0.5, 1.5, 1.0])

    def test_uniformity(self):
        assert Mesh.uniform(-2, 2, 101).is_uniform()
        assert not Mesh([0.0, 1.0, 3.0]).is_uniform()
        assert Mesh([0.0, 1.0, 3.0]).quasi_uniformity() == 2.0

    def test_field_length_checked(self):
        with pytest.raises(ValueError):
            NodalField(unit3, [1.0, 2.0])
        with pytest.raises(ValueError):
            NodalField(unit3, [1.0, np.nan, 2.0])


class TestLumpedProduct:
    @pytest.mark.parametrize("n", [2, 3, 17])
    def test_constant_one_integrates_to_length(self, n):
        m = Mesh(np.sort(np.r_[0.0, 1.0, np.linspace(0.1, 0.9, n - 2) ** 2])) if n > 2 else Mesh([0.0, 1.0])
        one = NodalField.constant(m, 1.0)
        assert lumped_product(one, one) == pytest.approx(1.0)

    def test_hand_example(self):
        a = NodalField(unit3, [1, 0, 0])
        b = NodalField(unit3, [1, 1, 1])
        assert lumped_product(a, b) == pytest.approx(0.25)

    def test_mesh_mismatch(self):
        a = NodalField(unit3, [1, 1, 1])
        b = NodalField(Mesh([0.0, 0.4, 1.0]), [1, 1, 1])
        with pytest.raises(MeshMismatchError):
            lumped_product(a, b)

    def test_same_nodes_rebuilt_is_compatible(self):
        a = NodalField(unit3, [1, 2, 3])
        b = NodalField(Mesh.uniform(0.0, 1.0, 3), [1, 1, 1])
        assert lumped_product(a, b) == pytest.approx(2.0)

    @given(sizes, st.data())
    def test_symmetric_bilinear_positive(self, hs, data):
        m = random_mesh(hs)
        n = m.n_nodes
        vec = st.lists(values, min_size=n, max_size=n)
        a = NodalField(m, data.draw(vec))
        b = NodalField(m, data.draw(vec))
        c = data.draw(values)
        assert lumped_product(a, b) == pytest.approx(lumped_product(b, a))
        assert lumped_product(c * a + b, b) == pytest.approx(
            c * lumped_product(a, b) + lumped_product(b, b), abs=1e-9
        )
        aa = lumped_product(a, a)
        assert aa >= 0
        assert (aa == 0) == (not np.any(a.values))


class TestInterpolateAndGradient:
    def test_linear(self):
        np.testing.assert_allclose(interpolate(lambda x: x, unit3).values, [0, 0.5, 1])

    def test_zero(self):
        assert not np.any(interpolate(lambda x: 0.0, unit3).values)

    def test_square(self):
        np.testing.assert_allclose(interpolate(lambda x: x**2, unit3).values, [0, 0.25, 1])

    def test_non_finite(self):
        with np.errstate(divide="ignore"), pytest.raises(ValueError):
            interpolate(lambda x: 1.0 / (x - 0.5), unit3)

    def test_gradient_examples(self):
        np.testing.assert_allclose(element_gradient(NodalField(unit3, [0, 1, 2])), [2, 2])
        np.testing.assert_allclose(element_gradient(NodalField(unit3, [3, 3, 3])), [0, 0])
        np.testing.assert_allclose(element_gradient(NodalField(unit3, [0, 1, 0])), [2, -2])

    @given(sizes, values, values)
    def test_linear_reproduced(self, hs, a, b):
        m = random_mesh(hs)
        g = element_gradient(interpolate(lambda x: a * x + b, m))
        np.testing.assert_allclose(g, a, atol=1e-9 * (1 + abs(a) + abs(b)))


class TestStiffness:
    def test_unit_weight(self):
        K = tridiag_to_dense(assemble_weighted_stiffness(np.ones(2), unit3))
        np.testing.assert_allclose(K, [[2, -2, 0], [-2, 4, -2], [0, -2, 2]])

    def test_zero_weight(self):
        assert not np.any(assemble_weighted_stiffness(np.zeros(2), unit3))

    def test_first_element_only(self):
        K = tridiag_to_dense(assemble_weighted_stiffness(np.array([1.0, 0.0]), unit3))
        np.testing.assert_allclose(K, [[2, -2, 0], [-2, 2, 0], [0, 0, 0]])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            assemble_weighted_stiffness(np.ones(3), unit3)

    @given(sizes, st.floats(-5, 5))
    def test_linear_in_weight(self, hs, c):
        m = random_mesh(hs)
        one = assemble_weighted_stiffness(np.ones(m.n_elements), m)
        np.testing.assert_allclose(assemble_weighted_stiffness(np.full(m.n_elements, c), m), c * one,
                                   atol=1e-12 * np.abs(one).max())

    def test_matches_element_quadrature(self):
        # midpoint rule is exact for piecewise-constant weight times constant gradients
        m = Mesh([0.0, 0.3, 0.5, 1.2])
        w = np.array([1.0, 2.0, 0.5])
        ref = np.zeros((4, 4))
        for e in range(3):
            h = m.element_sizes[e]
            ref[e:e + 2, e:e + 2] += w[e] / h * np.array([[1, -1], [-1, 1]])
        np.testing.assert_allclose(tridiag_to_dense(assemble_weighted_stiffness(w, m)), ref)


class TestInterleaving:
    def test_add_block_places_entries(self):
        rng = np.random.default_rng(0)
        n = 5
        blocks = {}
        band = np.zeros((7, 2 * n))
        dense = np.zeros((2 * n, 2 * n))
        for a in range(2):
            for b in range(2):
                tri = rng.normal(size=(3, n))
                tri[0, 0] = tri[2, -1] = 0.0
                add_block(band, tri, a, b)
                T = tridiag_to_dense(tri)
                dense[a::2, b::2] += T
        sys_ = BandedSystem(3, band, np.zeros(2 * n))
        np.testing.assert_allclose(sys_.to_dense(), dense)


class TestSolveBanded:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        assert np.allclose(solve_banded(BandedSystem.from_dense(np.eye(3), b, 1)), b)

    def test_two_by_two(self):
        x = solve_banded(BandedSystem.from_dense([[2, 1], [1, 2]], [3, 3], 1))
        np.testing.assert_allclose(x, [1, 1], atol=1e-14)

    def test_zero_matrix_singular(self):
        with pytest.raises(SingularSystemError):
            solve_banded(BandedSystem(1, np.zeros((3, 3)), np.ones(3)))

    def test_rank_deficient_singular(self):
        A = np.array([[1.0, 1.0, 0], [1.0, 1.0, 0], [0, 0, 1.0]])
        with pytest.raises(SingularSystemError):
            solve_banded(BandedSystem.from_dense(A, np.ones(3), 1))

    def test_needs_pivoting(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(solve_banded(BandedSystem.from_dense(A, [2, 3], 1)), [3, 2])

    def test_from_dense_rejects_out_of_band(self):
        with pytest.raises(ValueError):
            BandedSystem.from_dense(np.ones((3, 3)), np.ones(3), 1)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 50), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_agrees_with_dense(self, n, bw, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(n, n))
        A = np.triu(np.tril(A, bw), -bw)
        A += np.diag(np.abs(A).sum(axis=1) + 1.0)
        b = rng.normal(size=n)
        system = BandedSystem.from_dense(A, b, bw)
        x = solve_banded(system)
        ref = np.linalg.solve(A, b)
        assert np.linalg.norm(x - ref) <= 1e-10 * np.linalg.norm(ref)
        assert np.linalg.norm(system.matvec(x) - b) <= 1e-12 * (1 + np.linalg.norm(b))
