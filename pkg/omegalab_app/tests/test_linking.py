import cmath

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from omegalab_app.exceptions import NotUnitModulus, ShapeMismatch
from omegalab_app.services.linalg_service import adjoint, derive_seed, operator_norm, random_ginibre
from omegalab_app.services.linking_service import (
    LinkingElement, adjoint_linking, assemble, check_product_identities, corner_leak, corner_product,
    embed_l, embed_r, embed_T, embed_theta, linking_norm, linking_product, omega_element,
    omega_element_stack, product_identity_gaps, sign_variant, split
)
from omegalab_app.services.module_service import AlgebraElement, ModuleElement, ModuleShape, module_norm

# ==========================================================================
# TESTS – linking_service
# ==========================================================================

SCALAR = ModuleShape(n=1, m=1)
COLUMN = ModuleShape(n=1, m=2)
SQUARE = ModuleShape(n=2, m=2)


def random_module(shape, tag):
    return ModuleElement(shape, random_ginibre(shape.m, shape.n, derive_seed(31, 'module', tag)))


def random_algebra(shape, tag):
    return AlgebraElement(shape, random_ginibre(shape.n, shape.n, derive_seed(31, 'algebra', tag)))


def random_linking(shape, tag):
    size = shape.linking_size
    return split(shape, random_ginibre(size, size, derive_seed(31, 'linking', tag)))


class EmbeddingTests(SimpleTestCase):

    def test_layouts(self):
        assert_array_equal(assemble(embed_T(AlgebraElement(SCALAR, [[2]]))), [[2, 0], [0, 0]])
        assert_array_equal(assemble(embed_r(ModuleElement(SCALAR, [[3]]))), [[0, 0], [3, 0]])
        assert_array_equal(assemble(embed_l(ModuleElement(SCALAR, [[3]]))), [[0, 3], [0, 0]])
        identity = assemble(embed_T(AlgebraElement.identity(SQUARE)))
        assert_array_equal(identity, np.diag([1, 1, 0, 0]))

    def test_left_corner_is_conjugated(self):
        y = ModuleElement(COLUMN, [[1], [1j]])
        assert_array_equal(embed_l(y).block_l, [[1, -1j]])

    def test_left_is_adjoint_of_right(self):
        shape = ModuleShape(n=3, m=2)
        for k in range(5):
            y = random_module(shape, ('adj', k))
            assert_array_equal(assemble(adjoint_linking(embed_r(y))), assemble(embed_l(y)))

    def test_theta_corner(self):
        x, y = ModuleElement(COLUMN, [[1], [0]]), ModuleElement(COLUMN, [[0], [1]])
        assert_array_equal(embed_theta(x, y).block_k, [[0, 1], [0, 0]])
        self.assertEqual(linking_norm(embed_theta(ModuleElement.zero(COLUMN), ModuleElement.zero(COLUMN))), 0.0)
        with self.assertRaises(ShapeMismatch):
            embed_theta(x, ModuleElement.zero(SQUARE))

    def test_norms_of_embeddings(self):
        self.assertAlmostEqual(linking_norm(embed_r(ModuleElement(SQUARE, np.diag([1.0, 2.0])))), 2.0, places=13)
        self.assertAlmostEqual(linking_norm(embed_T(AlgebraElement(SQUARE, np.diag([3.0, 1.0])))), 3.0, places=13)
        self.assertEqual(linking_norm(LinkingElement.zero(SQUARE)), 0.0)

        shape = ModuleShape(n=3, m=4)
        for k in range(10):
            x, y, a = random_module(shape, ('iso-x', k)), random_module(shape, ('iso-y', k)), random_algebra(shape, k)
            norm = module_norm(x)
            self.assertAlmostEqual(linking_norm(embed_T(a)), operator_norm(a.mat), delta=1e-10 * operator_norm(a.mat))
            self.assertAlmostEqual(linking_norm(embed_r(x)), norm, delta=1e-10 * (1 + norm))
            self.assertAlmostEqual(linking_norm(embed_l(x)), norm, delta=1e-10 * (1 + norm))
            bound = norm * module_norm(y)
            self.assertLessEqual(linking_norm(embed_theta(x, y)), bound + 1e-9 * (1 + bound))


class BlockTests(SimpleTestCase):

    def test_assemble_layout(self):
        e = LinkingElement(SCALAR, [[2]], [[4]], [[3]], [[5]])
        assert_array_equal(assemble(e), [[2, 4], [3, 5]])
        assert_array_equal(assemble(LinkingElement.zero(COLUMN)), np.zeros((3, 3)))

    def test_block_sizes_are_checked(self):
        with self.assertRaises(ShapeMismatch):
            LinkingElement(COLUMN, np.zeros((1, 1)), np.zeros((2, 1)), np.zeros((2, 1)), np.zeros((2, 2)))
        with self.assertRaises(ShapeMismatch):
            split(COLUMN, np.zeros((2, 2)))

    def test_linearity(self):
        shape = ModuleShape(n=2, m=3)
        e1, e2 = random_linking(shape, 'lin-1'), random_linking(shape, 'lin-2')
        assert_allclose(assemble(e1 + e2), assemble(e1) + assemble(e2), atol=1e-15)
        assert_allclose(assemble(1j * e1), 1j * assemble(e1), atol=1e-15)

    def test_split_inverts_assemble(self):
        e = random_linking(ModuleShape(n=3, m=1), 'split')
        assert_array_equal(assemble(split(e.shape, assemble(e))), assemble(e))

    def test_c_star_identity(self):
        for k in range(10):
            e = random_linking(ModuleShape(n=2, m=3), ('cstar', k))
            norm = linking_norm(e)
            self.assertLessEqual(abs(norm ** 2 - linking_norm(linking_product(adjoint_linking(e), e))),
                                 1e-9 * norm ** 2)


class OmegaElementTests(SimpleTestCase):

    def test_examples(self):
        x = ModuleElement(SCALAR, [[1]])
        assert_array_equal(assemble(omega_element(1, x)), [[0, 1], [1, 0]])
        assert_allclose(assemble(omega_element(1j, x)), [[0, -1j], [1j, 0]], atol=0)

    def test_unit_modulus_is_required(self):
        with self.assertRaises(NotUnitModulus):
            omega_element(1.001, ModuleElement(SCALAR, [[1]]))
        with self.assertRaises(NotUnitModulus):
            omega_element(0, ModuleElement(SCALAR, [[1]]))

    def test_matches_generator_combination(self):
        shape = ModuleShape(n=2, m=3)
        for k in range(10):
            x = random_module(shape, ('combo', k))
            lam = cmath.exp(1j * 0.7 * (k + 1))
            expected = lam * assemble(embed_r(x)) + lam.conjugate() * assemble(embed_l(x))
            assert_allclose(assemble(omega_element(lam, x)), expected, atol=1e-15)

    def test_self_adjoint(self):
        shape = ModuleShape(n=3, m=2)
        for k in range(10):
            mat = assemble(omega_element(cmath.exp(1j * k), random_module(shape, ('sa', k))))
            self.assertLessEqual(float(np.max(np.abs(mat - adjoint(mat)))), 1e-15)

    def test_stack_matches_single_elements(self):
        x = random_module(ModuleShape(n=2, m=1), 'stack')
        thetas = np.array([0.0, 0.5, 2.0, 5.5])
        stack = omega_element_stack(thetas, x)
        self.assertEqual(stack.shape, (4, 3, 3))
        for theta, mat in zip(thetas, stack):
            assert_allclose(mat, assemble(omega_element(np.exp(1j * theta), x)), atol=1e-15)

    def test_sign_variants_have_norm_of_x(self):
        shape = ModuleShape(n=2, m=3)
        for k in range(5):
            x = random_module(shape, ('sign', k))
            norm = module_norm(x)
            for sign in (1, -1):
                self.assertAlmostEqual(linking_norm(sign_variant(x, sign)), norm, delta=1e-9 * (1 + norm))
        with self.assertRaises(ValueError):
            sign_variant(x, 2)


class ProductIdentityTests(SimpleTestCase):

    def test_examples(self):
        x, y = ModuleElement(COLUMN, [[1], [0]]), ModuleElement(COLUMN, [[0], [1]])
        one = AlgebraElement(COLUMN, [[1]])
        self.assertTrue(check_product_identities(x, y, one))
        self.assertTrue(check_product_identities(x, x, AlgebraElement.identity(COLUMN)))

    def test_random_triples(self):
        for n in range(1, 5):
            for m in range(1, 5):
                shape = ModuleShape(n=n, m=m)
                for k in range(8):
                    tag = (n, m, k)
                    x, y, a = random_module(shape, ('px', tag)), random_module(shape, ('py', tag)), random_algebra(shape, tag)
                    gaps = product_identity_gaps(x, y, a)
                    self.assertEqual(set(gaps), {'l_x r_y', 'r_x l_y', 'r_xa', 'l_xa'})
                    self.assertTrue(check_product_identities(x, y, a), gaps)

    def test_algebra_size_must_match(self):
        x = ModuleElement(COLUMN, [[1], [0]])
        with self.assertRaises(ShapeMismatch):
            check_product_identities(x, x, AlgebraElement.identity(SQUARE))
        with self.assertRaises(ShapeMismatch):
            check_product_identities(x, ModuleElement.zero(SQUARE), AlgebraElement(COLUMN, [[1]]))


class CornerTests(SimpleTestCase):

    def test_products_stay_in_their_corners(self):
        shape = ModuleShape(n=2, m=3)
        x, y, a = random_module(shape, 'cx'), random_module(shape, 'cy'), random_algebra(shape, 'ca')
        cases = (
            (linking_product(embed_l(x), embed_r(y)), ('block_a',)),
            (linking_product(embed_r(x), embed_l(y)), ('block_k',)),
            (linking_product(embed_r(x), embed_T(a)), ('block_r',)),
            (linking_product(embed_T(a), embed_l(x)), ('block_l',)),
        )
        for product, corners in cases:
            self.assertLessEqual(corner_leak(product, corners), 1e-13)

    def test_corner_product_is_product_of_omega_elements(self):
        shape = ModuleShape(n=2, m=2)
        x, y = random_module(shape, 'op-x'), random_module(shape, 'op-y')
        lam = cmath.exp(0.3j)
        product = linking_product(omega_element(lam, x), omega_element(lam, y))
        assert_allclose(assemble(product), assemble(corner_product(x, y)), atol=1e-12)
        self.assertEqual(corner_leak(corner_product(x, y), ('block_a', 'block_k')), 0.0)
