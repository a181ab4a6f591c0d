from dataclasses import dataclass

import numpy as np
from django.utils.translation import gettext as _

from omegalab_app.exceptions import NotUnitModulus, ShapeMismatch
from omegalab_app.services.linalg_service import adjoint, as_cmatrix, freeze, operator_norm
from omegalab_app.services.module_service import (
    AlgebraElement, ModuleShape, inner_product, module_action, require_same_shape, theta
)

# ==========================================================================
# LINKING_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Álgebra de enlace L(V) como matrices por bloques de tamaño
#              (n+m) x (n+m):
#
#                  [[ a (n x n),  l (n x m) ],
#                   [ r (m x n),  k (m x m) ]]
#
#              con las inmersiones T_a, r_x, l_y, theta_{x,y} y la norma C*
#              calculada como norma de operador de la matriz ensamblada.
# ==========================================================================

UNIT_MODULUS_TOL = 1e-12
PRODUCT_IDENTITY_TOL = 1e-11


def require_unit_modulus(lam):
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > UNIT_MODULUS_TOL:
        raise NotUnitModulus(_("|lambda| = %(mod).15g.") % {"mod": abs(lam)})
    return lam


# --------------------------------------------------------------------------
# Elemento del álgebra de enlace
# --------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class LinkingElement:
    shape: ModuleShape
    block_a: np.ndarray
    block_l: np.ndarray
    block_r: np.ndarray
    block_k: np.ndarray

    def __post_init__(self):
        n, m = self.shape.n, self.shape.m
        expected = {'block_a': (n, n), 'block_l': (n, m), 'block_r': (m, n), 'block_k': (m, m)}
        for name, dims in expected.items():
            block = as_cmatrix(getattr(self, name))
            if block.shape != dims:
                raise ShapeMismatch(_("%(name)s debe ser %(want)s, se recibió %(got)s.")
                                    % {"name": name, "want": dims, "got": block.shape})
            object.__setattr__(self, name, block)

    @classmethod
    def zero(cls, shape):
        n, m = shape.n, shape.m
        return cls(shape, np.zeros((n, n)), np.zeros((n, m)), np.zeros((m, n)), np.zeros((m, m)))

    def replace(self, **blocks):
        current = {'block_a': self.block_a, 'block_l': self.block_l,
                   'block_r': self.block_r, 'block_k': self.block_k}
        current.update(blocks)
        return LinkingElement(self.shape, **current)

    def __add__(self, other):
        if not isinstance(other, LinkingElement):
            return NotImplemented
        require_same_shape(self, other)
        return split(self.shape, assemble(self) + assemble(other))

    def __mul__(self, scalar):
        return split(self.shape, complex(scalar) * assemble(self))

    __rmul__ = __mul__


def assemble(e):
    """
    La matriz (n+m) x (n+m) [[a, l], [r, k]].
    """
    return freeze(np.block([[e.block_a, e.block_l], [e.block_r, e.block_k]]))


def split(shape, mat):
    """
    Inversa de assemble: corta una matriz (n+m) x (n+m) en sus cuatro esquinas.
    """
    mat = as_cmatrix(mat)
    size = shape.linking_size
    if mat.shape != (size, size):
        raise ShapeMismatch(_("Se esperaba una matriz %(size)sx%(size)s.") % {"size": size})
    n = shape.n
    return LinkingElement(shape, mat[:n, :n], mat[:n, n:], mat[n:, :n], mat[n:, n:])


def adjoint_linking(e):
    return split(e.shape, adjoint(assemble(e)))


def linking_product(e1, e2):
    require_same_shape(e1, e2)
    return split(e1.shape, assemble(e1) @ assemble(e2))


def linking_norm(e):
    """
    Norma C* de L(V): norma de operador de la matriz ensamblada completa.
    """
    return operator_norm(assemble(e))


# --------------------------------------------------------------------------
# Inmersiones de los generadores
# --------------------------------------------------------------------------
def embed_T(a):
    return LinkingElement.zero(a.shape).replace(block_a=a.mat)


def embed_r(x):
    return LinkingElement.zero(x.shape).replace(block_r=x.mat)


def embed_l(y):
    """
    l_y ocupa la esquina n x m con y*; coincide con adjoint_linking(embed_r(y)).
    """
    return LinkingElement.zero(y.shape).replace(block_l=adjoint(y.mat))


def embed_theta(x, y):
    return LinkingElement.zero(x.shape).replace(block_k=theta(x, y))


# --------------------------------------------------------------------------
# Elementos fuera de la diagonal usados por Omega
# --------------------------------------------------------------------------
def omega_element(lam, x):
    """
    [[0, conj(lambda) l_x], [lambda r_x, 0]]. Es autoadjunto como matriz.
    """
    lam = require_unit_modulus(lam)
    return LinkingElement.zero(x.shape).replace(block_l=lam.conjugate() * adjoint(x.mat),
                                                block_r=lam * x.mat)


def omega_element_stack(thetas, x):
    """
    Pila (N, n+m, n+m) con assemble(omega_element(e^{i theta}, x)) para cada theta.
    """
    thetas = np.asarray(thetas, dtype=np.float64).reshape(-1)
    n, size = x.shape.n, x.shape.linking_size
    lams = np.exp(1j * thetas)
    stack = np.zeros((thetas.size, size, size), dtype=np.complex128)
    stack[:, :n, n:] = np.conj(lams)[:, None, None] * adjoint(x.mat)[None, :, :]
    stack[:, n:, :n] = lams[:, None, None] * x.mat[None, :, :]
    return stack


def sign_variant(x, sign):
    """
    [[0, sign·l_x], [r_x, 0]]. sign = +1 es omega_element(1, x); sign = -1 es
    -i·omega_element(i, x), que tiene la misma norma.
    """
    if sign not in (1, -1):
        raise ValueError(_("El signo debe ser +1 o -1."))
    return LinkingElement.zero(x.shape).replace(block_l=sign * adjoint(x.mat), block_r=x.mat)


def corner_product(x, y):
    """
    block-diag(T_<x,y>, theta_{x,y}), el producto de los elementos de Omega de x e y.
    """
    require_same_shape(x, y)
    return LinkingElement.zero(x.shape).replace(block_a=inner_product(x, y).mat, block_k=theta(x, y))


# --------------------------------------------------------------------------
# Identidades de producto entre generadores
# --------------------------------------------------------------------------
def product_identity_gaps(x, y, a):
    """
    Máximo error por entrada de cada identidad:
        l_x r_y = T_<x,y>,  r_x l_y = theta_{x,y},  r_{xa} = r_x T_a,  l_{xa} = T_{a*} l_x
    """
    require_same_shape(x, y)
    if not isinstance(a, AlgebraElement) or a.shape.n != x.shape.n:
        raise ShapeMismatch()
    xa = module_action(x, a)
    a_on_x = AlgebraElement(x.shape, a.mat)
    pairs = {
        'l_x r_y': (assemble(embed_l(x)) @ assemble(embed_r(y)), assemble(embed_T(inner_product(x, y)))),
        'r_x l_y': (assemble(embed_r(x)) @ assemble(embed_l(y)), assemble(embed_theta(x, y))),
        'r_xa': (assemble(embed_r(xa)), assemble(embed_r(x)) @ assemble(embed_T(a_on_x))),
        'l_xa': (assemble(embed_l(xa)), assemble(embed_T(a_on_x.adjoint())) @ assemble(embed_l(x))),
    }
    return {name: float(np.max(np.abs(lhs - rhs))) for name, (lhs, rhs) in pairs.items()}


def check_product_identities(x, y, a):
    return all(gap <= PRODUCT_IDENTITY_TOL for gap in product_identity_gaps(x, y, a).values())


def corner_leak(e, corners):
    """
    Mayor entrada fuera de las esquinas indicadas (nombres de bloque).
    """
    outside = [getattr(e, name) for name in ('block_a', 'block_l', 'block_r', 'block_k') if name not in corners]
    return max((float(np.max(np.abs(block))) for block in outside), default=0.0)

