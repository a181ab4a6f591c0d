import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings
from django.utils.translation import gettext as _

from omegalab_app.exceptions import InvalidConfig
from omegalab_app.services.linalg_service import (
    adjoint, as_cmatrix, freeze, hermitian_norms, operator_norm, require_square
)
from omegalab_app.services.linking_service import assemble, embed_r, omega_element_stack, require_unit_modulus
from omegalab_app.services.module_service import module_norm

logger = logging.getLogger(__name__)

# ==========================================================================
# RADIUS_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Maximización global certificada sobre el círculo unidad.
#              Se usa para el radio numérico w(M) = sup ||Re(lambda M)|| y
#              para Omega(x) = 1/2 sup ||omega_element(lambda, x)||.
#
#              Etapas: grilla uniforme -> búsqueda por secciones (en lote) alrededor
#              de la mejor celda -> partición de celdas guiada por la cota de
#              Lipschitz. El certificado es max(cota superior por celda) - valor.
# ==========================================================================

TWO_PI = 2.0 * math.pi
TIE_WINDOW = 4.0 * np.finfo(np.float64).eps
BRUTEFORCE_CHUNK = 8192
MIN_BRUTEFORCE_SAMPLES = 16
SECTION_PROBES = 8
SECTION_MAX_EVALUATIONS = 48
MAX_CELL_PIECES = 8     # una celda abierta se parte en a lo sumo 8 subceldas por ronda


# --------------------------------------------------------------------------
# Configuración y resultado
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class RadiusConfig:
    grid_points: int = 1024
    refine_tol: float = 1e-10
    max_refine_iters: int = 200

    def __post_init__(self):
        if int(self.grid_points) != self.grid_points or self.grid_points < 8:
            raise InvalidConfig(_("grid_points debe ser un entero >= 8."))
        if not (math.isfinite(self.refine_tol) and self.refine_tol > 0):
            raise InvalidConfig(_("refine_tol debe ser positivo."))
        if int(self.max_refine_iters) != self.max_refine_iters or self.max_refine_iters < 1:
            raise InvalidConfig(_("max_refine_iters debe ser un entero positivo."))

    @classmethod
    def from_settings(cls, **overrides):
        """
        Valores de settings.OMEGALAB; los argumentos explícitos tienen prioridad.
        """
        values = {
            'grid_points': settings.OMEGALAB['GRID_POINTS'],
            'refine_tol': settings.OMEGALAB['REFINE_TOL'],
            'max_refine_iters': settings.OMEGALAB['MAX_REFINE_ITERS'],
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class RadiusResult:
    """
    value <= sup verdadero <= value + certificate. profile_samples guarda los
    pares (theta, objetivo) de la grilla inicial cuando se piden.
    """
    value: float
    argmax_theta: float
    certificate: float
    profile_samples: Optional[tuple] = None
    evaluations: int = 0

    @property
    def upper_bound(self):
        return self.value + self.certificate


# --------------------------------------------------------------------------
# Descomposición cartesiana
# --------------------------------------------------------------------------
def re_part(lam, mat):
    """
    Re(lambda M) = (lambda M + conj(lambda) M*) / 2, hermítica.
    """
    lam = require_unit_modulus(lam)
    mat = as_cmatrix(mat)
    require_square(mat)
    return as_cmatrix(0.5 * (lam * mat + lam.conjugate() * adjoint(mat)))


def im_part(lam, mat):
    """
    Im(lambda M) = (lambda M - conj(lambda) M*) / (2i); Re + i·Im = lambda M.
    """
    lam = require_unit_modulus(lam)
    mat = as_cmatrix(mat)
    require_square(mat)
    return as_cmatrix((lam * mat - lam.conjugate() * adjoint(mat)) / 2j)


def _real_part_stack(thetas, mat):
    lams = np.exp(1j * np.asarray(thetas, dtype=np.float64))[:, None, None]
    return 0.5 * (lams * mat[None, :, :] + np.conj(lams) * adjoint(mat)[None, :, :])


# --------------------------------------------------------------------------
# Maximizador certificado
# --------------------------------------------------------------------------
def _pick_argmax(thetas, values):
    # Empate: el menor theta dentro de la ventana del máximo
    top = float(np.max(values))
    window = TIE_WINDOW * (1.0 + abs(top))
    candidates = np.flatnonzero(values >= top - window)
    index = candidates[np.argmin(thetas[candidates])]
    return float(values[index]), float(thetas[index])


def _cell_bounds(thetas, values, lipschitz):
    # Celdas entre nodos consecutivos, incluida la que cruza 2pi -> 0
    right_t = np.append(thetas[1:], thetas[0] + TWO_PI)
    right_f = np.append(values[1:], values[0])
    widths = right_t - thetas
    upper = 0.5 * (values + right_f + lipschitz * widths)
    return np.maximum(upper, np.maximum(values, right_f)), widths


def _section_search(objective, center, center_value, half_width, rounds):
    """
    Búsqueda por secciones en [center - h, center + h] con sondeos en lote:
    cada ronda evalúa SECTION_PROBES ángulos equiespaciados en una sola
    llamada y se queda con el subintervalo alrededor del mejor, que se achica
    un factor 2 / (SECTION_PROBES + 1). Devuelve (thetas, valores) evaluados.
    """
    lo, hi = center - half_width, center + half_width
    best_t, best_f = center, center_value
    visited_t, visited_f = [], []
    for _round in range(rounds):
        probes = np.linspace(lo, hi, SECTION_PROBES + 2)[1:-1]
        probe_values = np.asarray(objective(probes % TWO_PI), dtype=np.float64)
        visited_t.append(probes % TWO_PI)
        visited_f.append(probe_values)
        index = int(np.argmax(probe_values))
        if probe_values[index] > best_f:
            best_t, best_f = float(probes[index]), float(probe_values[index])
        spacing = (hi - lo) / (SECTION_PROBES + 1)
        lo, hi = best_t - spacing, best_t + spacing
    if not visited_t:
        return np.empty(0), np.empty(0)
    return np.concatenate(visited_t), np.concatenate(visited_f)


def maximize_on_circle(objective, lipschitz, cfg, keep_profile=False, label="objetivo"):
    """
    Maximiza una función L-Lipschitz de theta en [0, 2pi). `objective` recibe
    un arreglo de ángulos y devuelve un arreglo de valores; toda evaluación
    se hace en lote.
    """
    grid = TWO_PI * np.arange(cfg.grid_points) / cfg.grid_points
    grid_values = np.asarray(objective(grid), dtype=np.float64)
    evaluations = grid.size
    budget = cfg.max_refine_iters

    thetas, values = grid.copy(), grid_values.copy()
    best_value, best_theta = _pick_argmax(thetas, values)
    spread = best_value - float(np.min(values))

    # Refinamiento local solo si el perfil no es plano
    rounds = min(SECTION_MAX_EVALUATIONS, budget // 2) // SECTION_PROBES
    if spread > cfg.refine_tol * (1.0 + best_value) and rounds > 0:
        new_t, new_f = _section_search(objective, best_theta, best_value, TWO_PI / cfg.grid_points, rounds)
        evaluations += new_t.size
        budget -= new_t.size
        thetas, unique_index = np.unique(np.concatenate([thetas, new_t]), return_index=True)
        values = np.concatenate([values, new_f])[unique_index]
        best_value, best_theta = _pick_argmax(thetas, values)

    # Partición de las celdas cuya cota superior todavía supera la tolerancia
    while True:
        upper, widths = _cell_bounds(thetas, values, lipschitz)
        target = cfg.refine_tol * (1.0 + best_value)
        gaps = upper - best_value
        open_cells = np.flatnonzero(gaps > target)
        # Si no alcanza el presupuesto para partir todas, el certificado no baja
        if open_cells.size == 0 or open_cells.size > budget:
            break
        pieces = min(MAX_CELL_PIECES, budget // open_cells.size + 1)
        fractions = np.arange(1, pieces) / pieces
        midpoints = ((thetas[open_cells, None] + widths[open_cells, None] * fractions[None, :]) % TWO_PI).ravel()
        mid_values = np.asarray(objective(midpoints), dtype=np.float64)
        evaluations += midpoints.size
        budget -= midpoints.size
        thetas, unique_index = np.unique(np.concatenate([thetas, midpoints]), return_index=True)
        values = np.concatenate([values, mid_values])[unique_index]
        best_value, best_theta = _pick_argmax(thetas, values)

    upper, _widths = _cell_bounds(thetas, values, lipschitz)
    certificate = max(float(np.max(upper)) - best_value, 0.0)
    logger.debug("%s: valor=%.17g theta=%.6f certificado=%.3e evaluaciones=%s",
                 label, best_value, best_theta, certificate, evaluations)

    profile = tuple(zip(grid.tolist(), grid_values.tolist())) if keep_profile else None
    return RadiusResult(value=max(best_value, 0.0), argmax_theta=best_theta % TWO_PI,
                        certificate=certificate, profile_samples=profile, evaluations=evaluations)


# --------------------------------------------------------------------------
# Radio numérico
# --------------------------------------------------------------------------
def numerical_radius(mat, cfg=None, keep_profile=False):
    """
    w(M) = sup_theta ||Re(e^{i theta} M)||. La función es ||M||-Lipschitz en theta.
    """
    cfg = cfg or RadiusConfig.from_settings()
    mat = as_cmatrix(mat)
    require_square(mat)
    frozen = freeze(mat.copy())

    def objective(thetas):
        return hermitian_norms(_real_part_stack(thetas, frozen))

    return maximize_on_circle(objective, operator_norm(frozen), cfg, keep_profile, label="w(M)")


def numerical_radius_bruteforce(mat, samples):
    """
    Máximo sobre `samples` ángulos equiespaciados, sin refinamiento ni certificado.
    """
    if int(samples) < MIN_BRUTEFORCE_SAMPLES:
        raise InvalidConfig(_("Se requieren al menos %(min)s muestras.") % {"min": MIN_BRUTEFORCE_SAMPLES})
    mat = as_cmatrix(mat)
    require_square(mat)
    best = 0.0
    for start in range(0, int(samples), BRUTEFORCE_CHUNK):
        index = np.arange(start, min(start + BRUTEFORCE_CHUNK, int(samples)))
        thetas = TWO_PI * index / int(samples)
        best = max(best, float(np.max(hermitian_norms(_real_part_stack(thetas, mat)))))
    return best


# --------------------------------------------------------------------------
# Omega
# --------------------------------------------------------------------------
def omega(x, cfg=None, keep_profile=False):
    """
    Omega(x) = 1/2 sup_lambda ||omega_element(lambda, x)||. La norma del
    elemento es 2||x||-Lipschitz en theta; con el factor 1/2 la constante es ||x||.
    """
    cfg = cfg or RadiusConfig.from_settings()

    def objective(thetas):
        return 0.5 * hermitian_norms(omega_element_stack(thetas, x))

    return maximize_on_circle(objective, module_norm(x), cfg, keep_profile, label="Omega(x)")


def omega_via_w(x, cfg=None):
    """
    Omega(x) como radio numérico de b = r_x: omega_element(lambda, x) = 2 Re(lambda b).
    """
    return numerical_radius(assemble(embed_r(x)), cfg)
