import functools
import hashlib
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from django.conf import settings
from django.utils.translation import gettext as _

from omegalab_app.exceptions import (
    InvalidConfig, NegativeEntry, NonFiniteEntry, NotHermitian, NotSquare, ZeroDimension
)

logger = logging.getLogger(__name__)

# ==========================================================================
# LINALG_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Núcleo de álgebra lineal compleja densa para matrices chicas:
#              adjuntas, autovalores hermíticos (Jacobi cíclico en orden paralelo),
#              normas de operador, radio espectral (Schur) y generador
#              Ginibre determinista basado en Philox.
# ==========================================================================
# --------------------------------------------------------------------------
# Tolerancias
# --------------------------------------------------------------------------
TOL_HERM = 1e-10    # relativa, para aceptar una matriz como hermítica
TOL_REL = 1e-9
TOL_ABS = 1e-9      # se escala con la mayor norma de la expresión

JACOBI_EPS = np.finfo(np.float64).eps
UINT64_MAX = 2 ** 64 - 1

# Alias de tipo: toda matriz del dominio es un ndarray complex128 2-D de solo lectura
CMatrix = np.ndarray


# --------------------------------------------------------------------------
# Construcción y validación de CMatrix
# --------------------------------------------------------------------------
def freeze(array):
    """
    Marca el arreglo como de solo lectura (los valores son inmutables).
    """
    array.flags.writeable = False
    return array


def as_cmatrix(data):
    """
    Convierte escalares, listas o arreglos en una CMatrix (copia complex128, solo lectura).
    Un escalar se interpreta como matriz 1x1.
    """
    mat = np.array(data, dtype=np.complex128)
    if mat.ndim == 0:
        mat = mat.reshape(1, 1)
    if mat.ndim != 2:
        raise ZeroDimension(_("Se esperaba una matriz 2-D, se recibió ndim=%(ndim)s.") % {"ndim": mat.ndim})
    if mat.size == 0:
        raise ZeroDimension()
    if not np.all(np.isfinite(mat)):
        raise NonFiniteEntry()
    return freeze(mat)


def require_square(mat):
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NotSquare(_("La matriz debe ser cuadrada, se recibió %(shape)s.") % {"shape": mat.shape})


def adjoint(mat):
    """
    Transpuesta conjugada. adjoint(adjoint(M)) == M exactamente.
    """
    return freeze(np.conj(np.asarray(mat, dtype=np.complex128)).T.copy())


# --------------------------------------------------------------------------
# Jacobi cíclico (orden paralelo round-robin) para pilas de matrices hermíticas
# --------------------------------------------------------------------------
def _off_diagonal_norm(stack):
    d = stack.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(stack[:, mask]) ** 2, axis=1))


@functools.lru_cache(maxsize=None)
def round_robin_steps(d):
    """
    Orden de torneo (método del círculo): un barrido son d-1 pasos (d par) o
    d pasos (d impar, con un índice ficticio). Cada paso es un conjunto de
    pares (p, q) disjuntos y cada par aparece exactamente una vez por barrido.
    """
    size = d + (d % 2)
    players = list(range(size))
    steps = []
    for _round in range(size - 1):
        pairs = sorted(
            (min(a, b), max(a, b))
            for a, b in ((players[i], players[size - 1 - i]) for i in range(size // 2))
            if a < d and b < d
        )
        steps.append((np.array([p for p, _q in pairs], dtype=np.intp),
                      np.array([q for _p, q in pairs], dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(steps)


def _rotate_pairs(stack, p_idx, q_idx):
    """
    Anula a la vez los pares disjuntos (p_idx[k], q_idx[k]) de cada matriz de
    la pila con una única transformación unitaria G^H · H · G. Para cada par,
    G = diag(1, conj(fase)) · R con R la rotación real clásica de Jacobi
    sobre el bloque [[alpha, |beta|], [|beta|, gamma]].
    """
    alpha = stack[:, p_idx, p_idx].real
    gamma = stack[:, q_idx, q_idx].real
    beta = stack[:, p_idx, q_idx]

    r = np.abs(beta)
    nonzero = r > 0.0
    safe_r = np.where(nonzero, r, 1.0)
    phase = np.where(nonzero, beta / safe_r, 1.0)

    theta = (gamma - alpha) / (2.0 * safe_r)
    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(nonzero, t, 0.0)
    c = 1.0 / np.hypot(t, 1.0)
    s = t * c
    conj_phase = np.conj(phase)

    batch, d = stack.shape[0], stack.shape[-1]
    rot = np.tile(np.eye(d, dtype=np.complex128), (batch, 1, 1))
    rot[:, p_idx, p_idx] = c
    rot[:, p_idx, q_idx] = s
    rot[:, q_idx, p_idx] = -s * conj_phase
    rot[:, q_idx, q_idx] = c * conj_phase

    rotated = np.conj(np.swapaxes(rot, -1, -2)) @ stack @ rot
    rotated[:, p_idx, q_idx] = 0.0
    rotated[:, q_idx, p_idx] = 0.0
    return rotated


def jacobi_eigenvalues(stack, max_sweeps=None):
    """
    Autovalores (sin ordenar) de una pila (..., d, d) de matrices hermíticas
    por barridos cíclicos de Jacobi en orden paralelo: cada paso rota d/2
    pares disjuntos de todas las matrices en una sola operación en lote.
    Solo se rotan las matrices que aún no convergieron; el criterio es
    ||off(H)||_F <= eps·||H||_F.
    """
    if max_sweeps is None:
        max_sweeps = settings.OMEGALAB['JACOBI_MAX_SWEEPS']

    arr = np.asarray(stack, dtype=np.complex128)
    batch_shape = arr.shape[:-2]
    d = arr.shape[-1]
    work = arr.reshape(-1, d, d)
    work = 0.5 * (work + np.conj(np.swapaxes(work, -1, -2)))

    if d > 1:
        scale = np.linalg.norm(work, axis=(1, 2))
        threshold = JACOBI_EPS * np.maximum(scale, np.finfo(np.float64).tiny)
        steps = round_robin_steps(d)

        for _sweep in range(max_sweeps):
            active = _off_diagonal_norm(work) > threshold
            if not active.any():
                break
            block = work if active.all() else work[active]
            for p_idx, q_idx in steps:
                block = _rotate_pairs(block, p_idx, q_idx)
            if active.all():
                work = block
            else:
                work[active] = block
        else:
            pending = int(np.count_nonzero(_off_diagonal_norm(work) > threshold))
            if pending:
                logger.warning("Jacobi no convergió en %s barridos para %s de %s matrices (d=%s).",
                               max_sweeps, pending, work.shape[0], d)

    eigenvalues = np.real(np.diagonal(work, axis1=1, axis2=2)).copy()
    return eigenvalues.reshape(batch_shape + (d,))


def _check_hermitian(mat):
    require_square(mat)
    gap = np.linalg.norm(mat - np.conj(mat).T)
    if gap > TOL_HERM * (1.0 + np.linalg.norm(mat)):
        raise NotHermitian(_("||M - M*|| = %(gap).3e supera la tolerancia.") % {"gap": gap})


def hermitian_eigenvalues(mat):
    """
    Autovalores en orden ascendente de una matriz hermítica.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    _check_hermitian(mat)
    return np.sort(jacobi_eigenvalues(mat))


def hermitian_max_eigenvalue(mat):
    """
    Mayor autovalor de una matriz hermítica (NotHermitian / NotSquare si no lo es).
    """
    return float(hermitian_eigenvalues(mat)[-1])


def hermitian_norms(stack):
    """
    Norma de cada matriz hermítica de la pila: max |autovalor|.
    """
    eigenvalues = jacobi_eigenvalues(stack)
    return np.max(np.abs(eigenvalues), axis=-1)


# --------------------------------------------------------------------------
# Normas y radio espectral
# --------------------------------------------------------------------------
def operator_norm(mat):
    """
    Mayor valor singular: sqrt del mayor autovalor de la matriz de Gram.
    Se usa el lado chico (M*M o MM*), que comparte los autovalores no nulos.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.size == 0:
        return 0.0
    rows, cols = mat.shape
    gram = np.conj(mat).T @ mat if cols <= rows else mat @ np.conj(mat).T
    top = float(np.max(jacobi_eigenvalues(gram)))
    return math.sqrt(max(top, 0.0))


def spectral_radius(mat):
    """
    Máximo módulo del espectro completo. La forma de Schur compleja (reducción a
    Hessenberg + iteración QR) deja los autovalores en la diagonal.
    """
    mat = np.asarray(mat, dtype=np.complex128)
    require_square(mat)
    schur_form, _unitary = scipy.linalg.schur(mat, output='complex')
    return float(np.max(np.abs(np.diag(schur_form))))


# --------------------------------------------------------------------------
# Matriz simétrica 2x2 con entradas no negativas
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class Sym2x2:
    """
    La matriz [[p, s], [s, q]] con p, s, q >= 0 (las entradas vienen de normas).
    """
    p: float
    s: float
    q: float

    def __post_init__(self):
        if min(self.p, self.s, self.q) < 0.0:
            raise NegativeEntry(_("Entradas recibidas: p=%(p)s, s=%(s)s, q=%(q)s.")
                                % {"p": self.p, "s": self.s, "q": self.q})

    def as_matrix(self):
        return as_cmatrix([[self.p, self.s], [self.s, self.q]])


def sym2x2_norm(block):
    """
    Norma de [[p, s], [s, q]] en forma cerrada: (p + q + sqrt((p - q)^2 + 4 s^2)) / 2.
    """
    return 0.5 * (block.p + block.q + math.hypot(block.p - block.q, 2.0 * block.s))


# --------------------------------------------------------------------------
# Números aleatorios reproducibles
# --------------------------------------------------------------------------
def _require_seed(seed):
    if not 0 <= int(seed) <= UINT64_MAX:
        raise InvalidConfig(_("La semilla debe ser un entero sin signo de 64 bits."))
    return int(seed)


def derive_seed(seed, *tags):
    """
    Semilla hija de 64 bits: BLAKE2b(seed || tags). Misma entrada, misma semilla
    en cualquier plataforma.
    """
    digest = hashlib.blake2b(digest_size=8)
    digest.update(_require_seed(seed).to_bytes(8, "little"))
    for tag in tags:
        digest.update(b"\x1f")
        digest.update(str(tag).encode("utf-8"))
    return int.from_bytes(digest.digest(), "little")


def random_ginibre(rows, cols, seed):
    """
    Matriz rows x cols con entradas normales complejas estándar i.i.d.
    (parte real e imaginaria independientes N(0, 1/2)). El generador es Philox
    con la semilla como clave y contador inicial cero.
    """
    if int(rows) < 1 or int(cols) < 1:
        raise ZeroDimension(_("Dimensiones recibidas: %(rows)s x %(cols)s.") % {"rows": rows, "cols": cols})
    generator = np.random.Generator(np.random.Philox(key=_require_seed(seed)))
    draws = generator.standard_normal((int(rows), int(cols), 2))
    return as_cmatrix((draws[..., 0] + 1j * draws[..., 1]) / math.sqrt(2.0))
