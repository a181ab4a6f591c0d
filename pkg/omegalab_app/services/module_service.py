import math
from dataclasses import dataclass
from numbers import Number

import numpy as np
from django.utils.translation import gettext as _

from omegalab_app.exceptions import ShapeMismatch, ZeroDimension
from omegalab_app.services.linalg_service import adjoint, as_cmatrix, operator_norm

# ==========================================================================
# MODULE_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Modelo concreto de dimensión finita: el álgebra A = M_n(C) y el
#              módulo de Hilbert V = matrices m x n, con producto interno
#              <x, y> = x* y y acción a derecha x·a.
# ==========================================================================

# --------------------------------------------------------------------------
# Forma del módulo
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class ModuleShape:
    """
    n: tamaño del álgebra (A = M_n), m: filas de los elementos del módulo (V = M_{m x n}).
    """
    n: int
    m: int

    def __post_init__(self):
        if int(self.n) < 1 or int(self.m) < 1:
            raise ZeroDimension(_("Forma inválida: n=%(n)s, m=%(m)s.") % {"n": self.n, "m": self.m})
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'm', int(self.m))

    @property
    def linking_size(self):
        return self.n + self.m


def require_same_shape(*elements):
    shapes = {element.shape for element in elements}
    if len(shapes) > 1:
        raise ShapeMismatch(_("Se esperaban elementos de la misma forma, se recibió %(shapes)s.")
                            % {"shapes": sorted((s.n, s.m) for s in shapes)})


# --------------------------------------------------------------------------
# Base común: valor inmutable con aritmética lineal
# --------------------------------------------------------------------------
class _MatrixValue:
    # La forma esperada de la matriz según la ModuleShape; la define cada subclase
    def expected_dims(self):
        raise NotImplementedError

    def __post_init__(self):
        mat = as_cmatrix(self.mat)
        if mat.shape != self.expected_dims():
            raise ShapeMismatch(_("%(kind)s requiere una matriz %(want)s, se recibió %(got)s.")
                                % {"kind": type(self).__name__, "want": self.expected_dims(), "got": mat.shape})
        object.__setattr__(self, 'mat', mat)

    def _combine(self, other, op):
        if not isinstance(other, type(self)):
            return NotImplemented
        require_same_shape(self, other)
        return type(self)(self.shape, op(self.mat, other.mat))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __neg__(self):
        return type(self)(self.shape, -self.mat)

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        return type(self)(self.shape, complex(scalar) * self.mat)

    __rmul__ = __mul__

    def allclose(self, other, atol=1e-12):
        return self.shape == other.shape and np.allclose(self.mat, other.mat, rtol=0.0, atol=atol)

    @classmethod
    def zero(cls, shape):
        return cls(shape, np.zeros(cls.dims_for(shape), dtype=np.complex128))

    @classmethod
    def from_entries(cls, shape, entries):
        """
        Construye el elemento desde una lista plana de escalares en orden por filas.
        """
        rows, cols = cls.dims_for(shape)
        flat = np.asarray(list(entries), dtype=np.complex128)
        if flat.size != rows * cols:
            raise ShapeMismatch(_("Se esperaban %(want)s entradas, se recibieron %(got)s.")
                                % {"want": rows * cols, "got": flat.size})
        return cls(shape, flat.reshape(rows, cols))


@dataclass(frozen=True, eq=False)
class AlgebraElement(_MatrixValue):
    """
    Elemento a de A = M_n(C). También aloja los valores <x, y>.
    """
    shape: ModuleShape
    mat: np.ndarray

    @staticmethod
    def dims_for(shape):
        return (shape.n, shape.n)

    def expected_dims(self):
        return self.dims_for(self.shape)

    @classmethod
    def identity(cls, shape):
        return cls(shape, np.eye(shape.n, dtype=np.complex128))

    def adjoint(self):
        return AlgebraElement(self.shape, adjoint(self.mat))

    def hermitian_part(self):
        """
        (a + a*) / 2. Con b = hermitian_part(a) se cumple x·b = x·b*.
        """
        return AlgebraElement(self.shape, 0.5 * (self.mat + adjoint(self.mat)))


@dataclass(frozen=True, eq=False)
class ModuleElement(_MatrixValue):
    """
    Elemento x de V = M_{m x n}(C).
    """
    shape: ModuleShape
    mat: np.ndarray

    @staticmethod
    def dims_for(shape):
        return (shape.m, shape.n)

    def expected_dims(self):
        return self.dims_for(self.shape)


# --------------------------------------------------------------------------
# Operaciones del módulo
# --------------------------------------------------------------------------
def inner_product(x, y):
    """
    <x, y> = x* · y (n x n). Cumple <x, y>* = <y, x> y <xa, y> = a*<x, y>.
    """
    require_same_shape(x, y)
    return AlgebraElement(x.shape, adjoint(x.mat) @ y.mat)


def module_action(x, a):
    """
    Producto del módulo x·a (m x n). Solo se exige el mismo n.
    """
    if x.shape.n != a.shape.n:
        raise ShapeMismatch(_("x tiene n=%(xn)s y a tiene n=%(an)s.") % {"xn": x.shape.n, "an": a.shape.n})
    return ModuleElement(x.shape, x.mat @ a.mat)


def module_norm(x):
    """
    ||x|| = ||<x, x>||^(1/2).
    """
    return math.sqrt(operator_norm(inner_product(x, x).mat))


def theta(x, y):
    """
    Operador compacto theta_{x,y}(z) = x<y, z>, realizado como la matriz m x m x·y*.
    """
    require_same_shape(x, y)
    return as_cmatrix(x.mat @ adjoint(y.mat))
