import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Optional

import numpy as np
from django.conf import settings
from django.utils.translation import gettext as _

from omegalab_app import __version__
from omegalab_app.exceptions import InvalidConfig, NotSquare, ShapeMismatch
from omegalab_app.services.linalg_service import (
    TOL_ABS, TOL_REL, Sym2x2, UINT64_MAX, adjoint, as_cmatrix, derive_seed, operator_norm,
    random_ginibre, spectral_radius, sym2x2_norm
)
from omegalab_app.services.linking_service import (
    adjoint_linking, assemble, corner_leak, corner_product, embed_l, embed_r, linking_norm,
    linking_product, omega_element, product_identity_gaps, sign_variant, split
)
from omegalab_app.services.module_service import (
    AlgebraElement, ModuleElement, ModuleShape, inner_product, module_action, module_norm
)
from omegalab_app.services.radius_service import (
    RadiusConfig, RadiusResult, numerical_radius, numerical_radius_bruteforce, omega, omega_via_w
)

logger = logging.getLogger(__name__)

# ==========================================================================
# HARNESS_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Verificación aleatoria y reproducible de las desigualdades de
#              Omega sobre instancias Ginibre. Cada chequeo devuelve un
#              CheckOutcome de un ensayo; run_suite los agrega por nombre.
#
#              Margen (slack) de una desigualdad lhs <= rhs: rhs - lhs.
#              Violación: slack < -(tol·(1 + |lhs| + |rhs|) + certificados).
# ==========================================================================

CHECK_NAMES = (
    'norm_axioms',
    'sandwich',
    'refinement_2_3',
    'refinement_2_3_degeneracy',
    'equality_2_4',
    'profile_flatness',
    'scaled_bounds_2_5',
    'lemma_2_8',
    'triangle_2_9',
    'corollary_2_10',
    'kernel_identities',
    'engine_cross_validation',
)

DEFAULT_SCALE_SAMPLES = (2j, complex(-0.5, 1.5), 0j, complex(-3.0, 0.0))
DEFAULT_PLAN_SHAPES = ((1, 1), (1, 3), (2, 2), (3, 2), (4, 4))

DEGENERACY_TOL = 1e-9
FLATNESS_TOL = 1e-9
CROSS_VALIDATION_SLACK = 1e-10
BRUTEFORCE_SAMPLES = 1024
NORMAL_CASE_SLACK = 1e-9
IDENTITY_TOL = 1e-11
CORNER_TOL = 1e-13
IMPLIED_TOL_FACTOR = 10.0
LEMMA_PAIRS_PER_TRIAL = 2
LEMMA_SIZES = (2, 6)


# --------------------------------------------------------------------------
# Tipos
# --------------------------------------------------------------------------
def _verify_grid_default():
    return RadiusConfig.from_settings(grid_points=settings.OMEGALAB['VERIFY_GRID_POINTS'])


@dataclass(frozen=True)
class TrialConfig:
    shape: ModuleShape
    trials: int
    master_seed: int = 0
    radius_cfg: RadiusConfig = field(default_factory=_verify_grid_default)
    tol: float = 1e-8
    scale_samples: tuple = DEFAULT_SCALE_SAMPLES
    checks: Optional[tuple] = None
    workers: int = 1
    replay_seed: Optional[int] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise InvalidConfig(_("trials debe ser un entero >= 1."))
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise InvalidConfig(_("tol debe ser positivo."))
        for seed in (self.master_seed, self.replay_seed):
            if seed is not None and not 0 <= int(seed) <= UINT64_MAX:
                raise InvalidConfig(_("Las semillas deben ser enteros sin signo de 64 bits."))
        if int(self.workers) < 1:
            raise InvalidConfig(_("workers debe ser >= 1."))
        if self.checks is not None:
            unknown = sorted(set(self.checks) - set(CHECK_NAMES))
            if unknown:
                raise InvalidConfig(_("Chequeos desconocidos: %(names)s.") % {"names": ", ".join(unknown)})
            object.__setattr__(self, 'checks', tuple(self.checks))
        object.__setattr__(self, 'scale_samples', tuple(complex(s) for s in self.scale_samples))

    def wants(self, name):
        return self.checks is None or name in self.checks


def default_trial_config(shape, **overrides):
    """
    TrialConfig con los valores de settings.OMEGALAB; los argumentos explícitos ganan.
    """
    values = {
        'trials': settings.OMEGALAB['VERIFY_TRIALS'],
        'tol': settings.OMEGALAB['VERIFY_TOL'],
        'workers': settings.OMEGALAB['TRIAL_WORKERS'] or os.cpu_count() or 1,
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return TrialConfig(shape=shape, **values)


@dataclass(frozen=True)
class RefinementTerms:
    gamma: float
    gamma_prime: float
    delta: float
    delta_prime: float
    lower_bound: float


@dataclass(frozen=True)
class TriangleTerms:
    omega_sum: RadiusResult
    middle: float
    omega_x: RadiusResult
    omega_y: RadiusResult
    corner: float


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    trials: int
    violations: int
    worst_margin: float
    witness_seed: Optional[int] = None
    # Ensayos de implicaciones cuyo antecedente no se cumplió; solo se registra en el log
    vacuous: int = 0


@dataclass(frozen=True)
class SuiteReport:
    config: tuple
    outcomes: tuple
    passed: bool
    version: str = __version__

    def outcome(self, name):
        return next((o for o in self.outcomes if o.name == name), None)


# --------------------------------------------------------------------------
# Libro de márgenes de un ensayo
# --------------------------------------------------------------------------
class _Ledger:
    def __init__(self, name, tol):
        self.name = name
        self.tol = tol
        self.worst = math.inf
        self.violated = False
        self.instances = 1
        self.vacuous = 0

    def _record(self, slack, ok):
        self.worst = min(self.worst, float(slack))
        self.violated = self.violated or not ok

    def leq(self, lhs, rhs, certificate=0.0):
        """
        Registra lhs <= rhs con la holgura tol·(1 + |lhs| + |rhs|) + certificate.
        """
        slack = rhs - lhs
        allowance = self.tol * (1.0 + abs(lhs) + abs(rhs)) + certificate
        self._record(slack, slack >= -allowance)

    def iff(self, gap_lhs, gap_rhs, tol):
        """
        (gap_lhs <= tol) <=> (gap_rhs <= tol). El margen mide qué tan lejos está
        el par de predicados de cambiar de valor.
        """
        lhs, rhs = gap_lhs <= tol, gap_rhs <= tol
        if lhs and rhs:
            self._record(tol - max(gap_lhs, gap_rhs), True)
        elif not lhs and not rhs:
            self._record(min(gap_lhs, gap_rhs) - tol, True)
        else:
            self._record(-abs(gap_lhs - gap_rhs), False)

    def outcome(self):
        return CheckOutcome(name=self.name, trials=self.instances, violations=int(self.violated),
                            worst_margin=self.worst, vacuous=self.vacuous)


class OmegaCache:
    """
    Memo de Omega por ensayo, indexado por forma y bytes de la matriz.
    Guarda siempre el perfil de la grilla.
    """
    def __init__(self, radius_cfg):
        self.radius_cfg = radius_cfg
        self._results = {}

    def __call__(self, x):
        key = (x.shape, x.mat.tobytes())
        if key not in self._results:
            self._results[key] = omega(x, self.radius_cfg, keep_profile=True)
        return self._results[key]


def _cache_for(cfg, cache):
    return cache if cache is not None else OmegaCache(cfg.radius_cfg)


# --------------------------------------------------------------------------
# Instancias
# --------------------------------------------------------------------------
def trial_seed(cfg, index):
    return derive_seed(cfg.master_seed, cfg.shape.n, cfg.shape.m, index)


def gen_instance(seed, shape):
    """
    Terna Ginibre (x, y, a) con semillas hash(seed, etiqueta).
    """
    x = ModuleElement(shape, random_ginibre(shape.m, shape.n, derive_seed(seed, 'x')))
    y = ModuleElement(shape, random_ginibre(shape.m, shape.n, derive_seed(seed, 'y')))
    a = AlgebraElement(shape, random_ginibre(shape.n, shape.n, derive_seed(seed, 'a')))
    return x, y, a


def _random_alpha(seed):
    return complex(random_ginibre(1, 1, derive_seed(seed, 'alpha'))[0, 0])


# --------------------------------------------------------------------------
# Chequeos
# --------------------------------------------------------------------------
def check_norm_axioms(x, y, alpha, cfg, cache=None):
    """
    Omega es una norma: positividad, Omega(x) = 0 => x = 0, homogeneidad y
    desigualdad triangular. `alpha` puede ser un escalar o una secuencia.
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('norm_axioms', cfg.tol)
    om_x, om_y, om_sum = cache(x), cache(y), cache(x + y)
    norm_x = module_norm(x)

    ledger.leq(0.0, om_x.value, om_x.certificate)
    if om_x.value <= cfg.tol:
        ledger.leq(norm_x, 2.0 * cfg.tol)

    for scalar in np.atleast_1d(np.asarray(alpha, dtype=np.complex128)):
        scalar = complex(scalar)
        om_scaled = cache(scalar * x)
        ledger.leq(om_scaled.value, abs(scalar) * om_x.value, abs(scalar) * om_x.certificate)
        ledger.leq(abs(scalar) * om_x.value, om_scaled.value, om_scaled.certificate)

    ledger.leq(om_sum.value, om_x.value + om_y.value, om_x.certificate + om_y.certificate)
    return ledger.outcome()


def check_sandwich(x, cfg, cache=None):
    """
    1/2 ||x|| <= Omega(x) <= ||x||, junto con las cotas de lambda = 1 y lambda = i.
    En el modelo matricial la cota inferior se alcanza: Omega(x) = 1/2 ||x||
    dentro de tol·(1 + ||x||).
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('sandwich', cfg.tol)
    om_x = cache(x)
    norm_x = module_norm(x)

    ledger.leq(0.5 * norm_x, om_x.value, om_x.certificate)
    ledger.leq(om_x.value, norm_x)
    ledger.leq(abs(om_x.value - 0.5 * norm_x), 0.0, cfg.tol * norm_x)
    for lam in (1.0, 1j):
        ledger.leq(0.5 * linking_norm(omega_element(lam, x)), om_x.value, om_x.certificate)
    return ledger.outcome()


def refinement_terms(x):
    norm_x = module_norm(x)
    plus = linking_norm(sign_variant(x, 1))
    minus = linking_norm(sign_variant(x, -1))
    gamma, gamma_prime = max(norm_x, plus), max(norm_x, minus)
    delta, delta_prime = abs(norm_x - plus), abs(norm_x - minus)
    lower = (4.0 * norm_x + 2.0 * abs(gamma - gamma_prime) + delta + delta_prime) / 8.0
    return RefinementTerms(gamma, gamma_prime, delta, delta_prime, lower)


def check_refinement_2_3(x, cfg, cache=None):
    """
    (4||x|| + 2|Gamma - Gamma'| + Delta + Delta') / 8 <= Omega(x).
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('refinement_2_3', cfg.tol)
    om_x = cache(x)
    terms = refinement_terms(x)

    ledger.leq(terms.lower_bound, om_x.value, om_x.certificate)
    ledger.leq(0.5 * module_norm(x), terms.lower_bound)
    ledger.leq(module_norm(x), terms.gamma)
    return ledger.outcome(), terms


def check_refinement_degeneracy(x, terms):
    """
    En el modelo matricial Gamma = Gamma' = ||x|| y Delta = Delta' = 0.
    """
    ledger = _Ledger('refinement_2_3_degeneracy', 0.0)
    bound = DEGENERACY_TOL * max(1.0, module_norm(x))
    for term in (terms.delta, terms.delta_prime, abs(terms.gamma - terms.gamma_prime)):
        ledger.leq(term, bound)
    return ledger.outcome()


def check_equality_condition_2_4(x, cfg, cache=None):
    """
    |Omega(x) - ||x||/2| <= tol  <=>  max_lambda | ||omega_element(lambda, x)|| - ||x|| | <= tol.
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('equality_2_4', cfg.tol)
    om_x = cache(x)
    norm_x = module_norm(x)
    linking_norms = 2.0 * np.array([value for _theta, value in om_x.profile_samples])

    gap_lhs = abs(om_x.value - 0.5 * norm_x)
    gap_rhs = float(np.max(np.abs(linking_norms - norm_x)))
    ledger.iff(gap_lhs, gap_rhs, cfg.tol)
    return ledger.outcome()


def check_profile_flatness(x, cfg, cache=None):
    """
    max - min del perfil theta -> 1/2 ||omega_element(e^{i theta}, x)|| sobre la grilla.
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('profile_flatness', 0.0)
    values = np.array([value for _theta, value in cache(x).profile_samples])
    top = float(np.max(values))
    ledger.leq(top - float(np.min(values)), FLATNESS_TOL * (1.0 + top))
    return ledger.outcome()


def check_scaled_bounds_2_5(x, a, cfg, cache=None):
    """
    Omega(xa ± xa*) <= 2||a ± a*|| Omega(x), la cota gruesa 4||a|| Omega(x) con su
    cadena intermedia, y Omega(xh) <= ||h + h*|| Omega(x) para h = (a + a*)/2.
    """
    if a.shape.n != x.shape.n:
        raise ShapeMismatch()
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('scaled_bounds_2_5', cfg.tol)
    om_x = cache(x)
    xa, xa_star = module_action(x, a), module_action(x, a.adjoint())
    norm_a = operator_norm(a.mat)

    for sign in (1, -1):
        z = xa + sign * xa_star
        factor = 2.0 * operator_norm(a.mat + sign * adjoint(a.mat))
        ledger.leq(cache(z).value, factor * om_x.value, factor * om_x.certificate)

    z_plus = cache(xa + xa_star)
    ledger.leq(z_plus.value, 4.0 * norm_a * om_x.value, 4.0 * norm_a * om_x.certificate)
    norm_z = module_norm(xa + xa_star)
    ledger.leq(z_plus.value, norm_z)
    ledger.leq(norm_z, 2.0 * norm_a * module_norm(x))
    ledger.leq(2.0 * norm_a * module_norm(x), 4.0 * norm_a * om_x.value, 4.0 * norm_a * om_x.certificate)

    # xh = xh* con h hermítica
    h = a.hermitian_part()
    factor_h = operator_norm(h.mat + adjoint(h.mat))
    ledger.leq(cache(module_action(x, h)).value, factor_h * om_x.value, factor_h * om_x.certificate)

    # Mejora sobre la cota gruesa
    factor_plus = 2.0 * operator_norm(a.mat + adjoint(a.mat))
    ledger.leq(factor_plus * om_x.value, 4.0 * norm_a * om_x.value)
    return ledger.outcome()


def improvement_margin(x, a, cfg, cache=None):
    """
    4||a|| Omega(x) - 2||a + a*|| Omega(x).
    """
    om_x = _cache_for(cfg, cache)(x)
    return (4.0 * operator_norm(a.mat) - 2.0 * operator_norm(a.mat + adjoint(a.mat))) * om_x.value


def lemma_2_8_terms(mat_a, mat_b):
    block = Sym2x2(p=operator_norm(mat_a), s=math.sqrt(operator_norm(mat_a @ mat_b)), q=operator_norm(mat_b))
    return spectral_radius(mat_a + mat_b), sym2x2_norm(block)


def check_lemma_2_8(mat_a, mat_b, cfg=None):
    """
    R(A + B) <= || [[||A||, ||AB||^(1/2)], [||AB||^(1/2), ||B||]] ||.
    """
    mat_a, mat_b = as_cmatrix(mat_a), as_cmatrix(mat_b)
    for mat in (mat_a, mat_b):
        if mat.shape[0] != mat.shape[1]:
            raise NotSquare()
    if mat_a.shape != mat_b.shape:
        raise ShapeMismatch()
    ledger = _Ledger('lemma_2_8', cfg.tol if cfg else settings.OMEGALAB['VERIFY_TOL'])
    radius, bound = lemma_2_8_terms(mat_a, mat_b)
    ledger.leq(radius, bound)
    return ledger.outcome()


def check_lemma_2_8_structured(x, y, lam, cfg):
    """
    El par a = omega_element(lambda, x), b = omega_element(lambda, y): además de la
    desigualdad se verifica que ab = block-diag(T_<x,y>, theta_{x,y}).
    """
    ledger = _Ledger('lemma_2_8', cfg.tol)
    mat_a, mat_b = assemble(omega_element(lam, x)), assemble(omega_element(lam, y))
    product_gap = float(np.max(np.abs(mat_a @ mat_b - assemble(corner_product(x, y)))))
    ledger.leq(product_gap, IDENTITY_TOL * (1.0 + module_norm(x) * module_norm(y)))
    radius, bound = lemma_2_8_terms(mat_a, mat_b)
    ledger.leq(radius, bound)
    return ledger.outcome()


def corner_norm(x, y):
    """
    D = || block-diag(T_<x,y>, theta_{x,y}) ||.
    """
    return linking_norm(corner_product(x, y))


def triangle_terms(x, y, cache):
    """
    Omega(x + y), la norma de la matriz 2x2 intermedia, Omega(x), Omega(y) y D.
    """
    om_x, om_y, om_sum = cache(x), cache(y), cache(x + y)
    d_norm = corner_norm(x, y)
    middle = sym2x2_norm(Sym2x2(p=om_x.value, s=0.5 * math.sqrt(d_norm), q=om_y.value))
    return TriangleTerms(om_sum, middle, om_x, om_y, d_norm)


def tight_triangle(x, y):
    """
    x = y o algún argumento nulo: la cadena del triángulo es de igualdades.
    """
    return x.allclose(y, atol=0.0) or module_norm(x) == 0.0 or module_norm(y) == 0.0


def check_triangle_2_9(x, y, cfg, cache=None):
    """
    Omega(x + y) <= ||[[Omega(x), D^(1/2)/2], [D^(1/2)/2, Omega(y)]]|| <= Omega(x) + Omega(y)
    y D <= 4 Omega(x) Omega(y). Con x = y (o un argumento nulo) ambas cotas
    se alcanzan y se registran como igualdades.
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('triangle_2_9', cfg.tol)
    terms = triangle_terms(x, y, cache)
    om_x, om_y, om_sum, middle, d_norm = terms.omega_x, terms.omega_y, terms.omega_sum, terms.middle, terms.corner
    certs = om_x.certificate + om_y.certificate

    ledger.leq(om_sum.value, middle, certs)
    ledger.leq(middle, om_x.value + om_y.value, certs)
    ledger.leq(d_norm, 4.0 * om_x.value * om_y.value,
               4.0 * (om_x.value * om_y.certificate + om_y.value * om_x.certificate
                      + om_x.certificate * om_y.certificate))

    if tight_triangle(x, y):
        ledger.leq(abs(om_sum.value - middle), 0.0)
        ledger.leq(abs(middle - om_x.value - om_y.value), 0.0)
        ledger.leq(abs(om_sum.value - om_x.value - om_y.value), 0.0)

    # omega_element(lambda, x + y) es autoadjunto: norma = radio espectral
    element = assemble(omega_element(np.exp(1j * om_sum.argmax_theta), x + y))
    norm_e, radius_e = operator_norm(element), spectral_radius(element)
    ledger.leq(norm_e, radius_e)
    ledger.leq(radius_e, norm_e)
    return ledger.outcome()


def implied_tolerance(cfg, om_x, om_y):
    return IMPLIED_TOL_FACTOR * cfg.tol * (1.0 + om_x + om_y)


def check_corollary_2_10(x, y, cfg, cache=None):
    """
    Si Omega(x + y) = Omega(x) + Omega(y) entonces D = 4 Omega(x) Omega(y).
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('corollary_2_10', 0.0)
    om_x, om_y, om_sum = cache(x).value, cache(y).value, cache(x + y).value

    if abs(om_sum - om_x - om_y) <= cfg.tol:
        consequent_gap = abs(corner_norm(x, y) - 4.0 * om_x * om_y)
        ledger.leq(consequent_gap, implied_tolerance(cfg, om_x, om_y))
    else:
        ledger.vacuous = 1
    return ledger.outcome()


def check_kernel_identities(x, y, a, cfg, seed=0):
    """
    Identidad C*, submultiplicatividad, R <= ||.||, r* = l, isometría de las
    inmersiones, autoadjunción de omega_element, las cuatro identidades de
    producto y el cierre por esquinas.
    """
    ledger = _Ledger('kernel_identities', 0.0)
    shape = x.shape
    linking = split(shape, random_ginibre(shape.linking_size, shape.linking_size, derive_seed(seed, "linking")))

    for mat in (x.mat, a.mat, assemble(linking)):
        norm = operator_norm(mat)
        ledger.leq(abs(norm ** 2 - operator_norm(adjoint(mat) @ mat)), TOL_REL * max(norm ** 2, 1.0))
    for mat in (a.mat, assemble(linking)):
        norm = operator_norm(mat)
        ledger.leq(spectral_radius(mat), norm + TOL_ABS * (1.0 + norm))

    ip = inner_product(x, y).mat
    ledger.leq(operator_norm(a.mat @ ip), operator_norm(a.mat) * operator_norm(ip)
               + TOL_ABS * (1.0 + operator_norm(a.mat) * operator_norm(ip)))

    adjoint_gap = float(np.max(np.abs(assemble(adjoint_linking(embed_r(y))) - assemble(embed_l(y)))))
    ledger.leq(adjoint_gap, IDENTITY_TOL)

    norm_x = module_norm(x)
    for embedded in (embed_r(x), embed_l(x)):
        ledger.leq(abs(linking_norm(embedded) - norm_x), TOL_REL * (1.0 + norm_x))

    element = assemble(omega_element(np.exp(0.7j), x))
    ledger.leq(float(np.max(np.abs(element - adjoint(element)))), 1e-14 * (1.0 + norm_x))

    for gap in product_identity_gaps(x, y, a).values():
        ledger.leq(gap, IDENTITY_TOL * (1.0 + norm_x * max(module_norm(y), operator_norm(a.mat))))

    ledger.leq(corner_leak(linking_product(embed_l(x), embed_r(y)), {'block_a'}), CORNER_TOL)
    ledger.leq(corner_leak(linking_product(embed_r(x), embed_l(y)), {'block_k'}), CORNER_TOL)
    return ledger.outcome()


def check_engine_cross_validation(x, a, cfg, cache=None):
    """
    Omega(x) contra w(r_x); w de la parte hermítica de a contra su radio
    espectral; 1/2 ||a|| <= w(a) <= ||a||; y w(a) contra el barrido denso de
    BRUTEFORCE_SAMPLES ángulos, que queda a menos de pi·||a|| / BRUTEFORCE_SAMPLES.
    """
    cache = _cache_for(cfg, cache)
    ledger = _Ledger('engine_cross_validation', 0.0)
    om_x, via_w = cache(x), omega_via_w(x, cfg.radius_cfg)
    certs = om_x.certificate + via_w.certificate + CROSS_VALIDATION_SLACK
    ledger.leq(om_x.value, via_w.value, certs)
    ledger.leq(via_w.value, om_x.value, certs)

    h = a.hermitian_part().mat
    w_h, radius_h = numerical_radius(h, cfg.radius_cfg), spectral_radius(h)
    ledger.leq(radius_h, w_h.value, w_h.certificate + NORMAL_CASE_SLACK)
    ledger.leq(w_h.value, radius_h, NORMAL_CASE_SLACK)

    w_a, norm_a = numerical_radius(a.mat, cfg.radius_cfg), operator_norm(a.mat)
    tol = cfg.tol * (1.0 + norm_a)
    ledger.leq(0.5 * norm_a, w_a.value, w_a.certificate + tol)
    ledger.leq(w_a.value, norm_a, tol)

    # Motor certificado contra el máximo denso sobre ángulos equiespaciados
    dense = numerical_radius_bruteforce(a.mat, BRUTEFORCE_SAMPLES)
    ledger.leq(dense, w_a.value, w_a.certificate + CROSS_VALIDATION_SLACK)
    ledger.leq(w_a.value, dense, math.pi * norm_a / BRUTEFORCE_SAMPLES + CROSS_VALIDATION_SLACK)
    return ledger.outcome()


# --------------------------------------------------------------------------
# Ejecución de un ensayo
# --------------------------------------------------------------------------
def _lemma_pairs(seed):
    low, high = LEMMA_SIZES
    for k in range(LEMMA_PAIRS_PER_TRIAL):
        size = low + derive_seed(seed, 'lemma-size', k) % (high - low + 1)
        yield (random_ginibre(size, size, derive_seed(seed, 'lemma-a', k)),
               random_ginibre(size, size, derive_seed(seed, 'lemma-b', k)))


def _merge(first, second):
    """
    Une dos resultados del mismo chequeo; ante empate de margen gana el primero.
    """
    if first is None:
        return second
    keep_first = first.worst_margin <= second.worst_margin
    return CheckOutcome(
        name=first.name,
        trials=first.trials + second.trials,
        violations=first.violations + second.violations,
        worst_margin=min(first.worst_margin, second.worst_margin),
        witness_seed=first.witness_seed if keep_first else second.witness_seed,
        vacuous=first.vacuous + second.vacuous,
    )


def run_trial(cfg, seed):
    """
    Todos los chequeos seleccionados sobre la instancia de `seed`, en el orden de CHECK_NAMES.
    """
    x, y, a = gen_instance(seed, cfg.shape)
    cache = OmegaCache(cfg.radius_cfg)
    alphas = cfg.scale_samples + (_random_alpha(seed),)
    results = {}

    def add(outcome):
        stamped = replace(outcome, witness_seed=seed)
        results[outcome.name] = _merge(results.get(outcome.name), stamped)

    if cfg.wants('norm_axioms'):
        add(check_norm_axioms(x, y, alphas, cfg, cache))
    if cfg.wants('sandwich'):
        add(check_sandwich(x, cfg, cache))
    if cfg.wants('refinement_2_3') or cfg.wants('refinement_2_3_degeneracy'):
        outcome, terms = check_refinement_2_3(x, cfg, cache)
        if cfg.wants('refinement_2_3'):
            add(outcome)
        if cfg.wants('refinement_2_3_degeneracy'):
            add(check_refinement_degeneracy(x, terms))
    if cfg.wants('equality_2_4'):
        add(check_equality_condition_2_4(x, cfg, cache))
    if cfg.wants('profile_flatness'):
        add(check_profile_flatness(x, cfg, cache))
    if cfg.wants('scaled_bounds_2_5'):
        add(check_scaled_bounds_2_5(x, a, cfg, cache))
    if cfg.wants('lemma_2_8'):
        for mat_a, mat_b in _lemma_pairs(seed):
            add(check_lemma_2_8(mat_a, mat_b, cfg))
        add(check_lemma_2_8_structured(x, y, np.exp(1j * cache(x + y).argmax_theta), cfg))
    for first, second in ((x, y), (x, x)):
        if cfg.wants('triangle_2_9'):
            add(check_triangle_2_9(first, second, cfg, cache))
        if cfg.wants('corollary_2_10'):
            add(check_corollary_2_10(first, second, cfg, cache))
    if cfg.wants('kernel_identities'):
        add(check_kernel_identities(x, y, a, cfg, seed))
    if cfg.wants('engine_cross_validation'):
        add(check_engine_cross_validation(x, a, cfg, cache))

    return [results[name] for name in CHECK_NAMES if name in results]


# --------------------------------------------------------------------------
# Suite
# --------------------------------------------------------------------------
def _aggregate(per_trial):
    merged = {}
    for outcomes in per_trial:
        for outcome in outcomes:
            merged[outcome.name] = _merge(merged.get(outcome.name), outcome)
    return tuple(merged[name] for name in CHECK_NAMES if name in merged)


def run_suite(cfg):
    """
    Ejecuta cfg.trials ensayos (o solo replay_seed) y agrega los resultados.
    Con workers > 1 los ensayos corren en procesos separados; el contenido del
    reporte no depende de cfg.workers. En una repetición el eco declara el
    único ensayo ejecutado.
    """
    if cfg.replay_seed is not None:
        seeds = [int(cfg.replay_seed)]
        cfg = replace(cfg, trials=1)
    else:
        seeds = [trial_seed(cfg, index) for index in range(cfg.trials)]

    logger.info("Suite iniciada: forma=(%s, %s) ensayos=%s semilla=%s procesos=%s",
                cfg.shape.n, cfg.shape.m, len(seeds), cfg.master_seed, cfg.workers)

    trial = partial(run_trial, cfg)
    if cfg.workers > 1 and len(seeds) > 1:
        chunksize = max(1, len(seeds) // (4 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            per_trial = list(executor.map(trial, seeds, chunksize=chunksize))
    else:
        per_trial = [trial(seed) for seed in seeds]

    outcomes = _aggregate(per_trial)
    for outcome in outcomes:
        if outcome.violations:
            logger.warning("Chequeo %s: %s violaciones en %s ensayos (margen %.3e, semilla testigo %s).",
                           outcome.name, outcome.violations, outcome.trials, outcome.worst_margin,
                           outcome.witness_seed)
        if outcome.vacuous:
            logger.info("Chequeo %s: %s ensayos vacuos de %s.", outcome.name, outcome.vacuous, outcome.trials)

    passed = all(outcome.violations == 0 for outcome in outcomes)
    logger.info("Suite finalizada: forma=(%s, %s) aprobada=%s", cfg.shape.n, cfg.shape.m, passed)
    return SuiteReport(config=(cfg,), outcomes=outcomes, passed=passed)


def default_plan(master_seed=0, trials=None, **overrides):
    """
    Un TrialConfig por cada forma del plan por defecto.
    """
    return [default_trial_config(ModuleShape(n, m), master_seed=master_seed, trials=trials, **overrides)
            for n, m in DEFAULT_PLAN_SHAPES]


def combine_reports(reports):
    """
    Une reportes de varias formas: configuraciones concatenadas y chequeos unidos por nombre.
    """
    reports = list(reports)
    configs = tuple(cfg for report in reports for cfg in report.config)
    outcomes = _aggregate([report.outcomes for report in reports])
    return SuiteReport(config=configs, outcomes=outcomes,
                       passed=all(outcome.violations == 0 for outcome in outcomes))
