import logging
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.conf import settings
from django.core.management.base import CommandError, CommandParser
from django.utils.translation import gettext as _
from rest_framework import serializers

from omegalab_app.exceptions import OmegaLabError
from omegalab_app.serializers import (
    COMMANDS, CliConfigSerializer, ProfileSerializer, RadiusResultSerializer, SuiteReportSerializer,
    render_json
)
from omegalab_app.services.harness_service import (
    CHECK_NAMES, combine_reports, default_plan, default_trial_config, run_suite
)
from omegalab_app.services.module_service import ModuleElement, ModuleShape
from omegalab_app.services.radius_service import RadiusConfig, numerical_radius, omega

logger = logging.getLogger(__name__)

# ==========================================================================
# CLI_SERVICE – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Lógica de la línea de comandos `manage.py radius`: parseo y
#              validación de opciones, ejecución de cada subcomando y códigos
#              de salida {0 aprobado, 1 violación, 2 uso/IO}.
# ==========================================================================

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

ENTRIES_HELP = (
    "Entradas en orden por filas separadas por coma, cada una 're+imi' "
    "(ej. '1+2i,0,-i,3.5'). La unidad imaginaria es 'i'."
)


class UsageError(CommandError):
    def __init__(self, message):
        super().__init__(message, returncode=EXIT_USAGE)


@dataclass(frozen=True)
class CliConfig:
    command: str
    n: Optional[int] = None
    m: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 0
    tol: Optional[float] = None
    grid_points: Optional[int] = None
    output_path: Optional[str] = None
    check_filter: Optional[tuple] = None
    entries: Optional[tuple] = None
    replay_seed: Optional[int] = None

    @property
    def shape(self):
        if self.n is None:
            return None
        return ModuleShape(self.n, self.m if self.m is not None else self.n)


# --------------------------------------------------------------------------
# Parseo
# --------------------------------------------------------------------------
def add_cli_arguments(parser):
    """
    Opciones compartidas por parse_args y el comando de manage.py.
    """
    parser.add_argument('command', choices=COMMANDS,
                        help="verify: suite de verificación; omega: Omega(x); "
                             "wradius: radio numérico de una matriz n x n; profile: perfil en lambda de Omega(x).")
    parser.add_argument('--n', help="Tamaño del álgebra A = M_n (en wradius, tamaño de la matriz).")
    parser.add_argument('--m', help="Filas de los elementos del módulo V = M_{m x n}.")
    parser.add_argument('--trials', help="Ensayos por forma (por defecto OMEGALAB_VERIFY_TRIALS = %s)."
                                         % settings.OMEGALAB['VERIFY_TRIALS'])
    parser.add_argument('--seed', help="Semilla maestra de 64 bits sin signo (por defecto 0).")
    parser.add_argument('--tol', help="Tolerancia de las desigualdades (por defecto %s)."
                                      % settings.OMEGALAB['VERIFY_TOL'])
    parser.add_argument('--grid-points', dest='grid_points',
                        help="Puntos de la grilla en lambda (verify: %s, resto: %s)."
                             % (settings.OMEGALAB['VERIFY_GRID_POINTS'], settings.OMEGALAB['GRID_POINTS']))
    parser.add_argument('--out', help="Archivo de salida del JSON (por defecto la salida estándar).")
    parser.add_argument('--check', help="Chequeos a ejecutar, separados por coma: %s." % ", ".join(CHECK_NAMES))
    parser.add_argument('--entries', help=ENTRIES_HELP)
    parser.add_argument('--replay', help="Repite un único ensayo con esta semilla derivada (requiere --n y --m).")


def build_parser():
    # called_from_command_line=False: los errores de argparse se levantan como CommandError
    parser = CommandParser(prog='manage.py radius',
                           description="Radio numérico Omega en módulos de Hilbert C* de dimensión finita.",
                           called_from_command_line=False)
    add_cli_arguments(parser)
    return parser


def config_from_options(options):
    """
    Valida el diccionario de opciones con CliConfigSerializer y arma el CliConfig.
    """
    raw = {key: options.get(key) for key in CliConfigSerializer().fields}
    serializer = CliConfigSerializer(data=raw)
    if not serializer.is_valid():
        message = "; ".join(
            "%s: %s" % (field, " ".join(str(error) for error in errors))
            for field, errors in serializer.errors.items()
        )
        logger.error("Uso inválido de la CLI: %s", message)
        raise UsageError(message)

    data = serializer.validated_data
    return CliConfig(
        command=data['command'],
        n=data.get('n'),
        m=data.get('m'),
        trials=data.get('trials'),
        seed=data.get('seed') or 0,
        tol=data.get('tol'),
        grid_points=data.get('grid_points'),
        output_path=data.get('out'),
        check_filter=data.get('check'),
        entries=data.get('entries'),
        replay_seed=data.get('replay'),
    )


def parse_args(argv):
    """
    argv (sin el nombre del programa) -> CliConfig. Errores de uso -> UsageError.
    """
    try:
        options = vars(build_parser().parse_args(list(argv)))
    except CommandError as exc:
        logger.error("Uso inválido de la CLI: %s", exc)
        raise UsageError(str(exc))
    return config_from_options(options)


# --------------------------------------------------------------------------
# Ejecución
# --------------------------------------------------------------------------
def _radius_cfg(config, default_grid):
    return RadiusConfig.from_settings(grid_points=config.grid_points or default_grid)


def run_verify(config):
    """
    Sin --n/--m ejecuta el plan por defecto y combina los reportes.
    """
    radius_cfg = _radius_cfg(config, settings.OMEGALAB['VERIFY_GRID_POINTS'])
    options = {
        'master_seed': config.seed,
        'trials': config.trials,
        'tol': config.tol,
        'radius_cfg': radius_cfg,
        'checks': config.check_filter,
        'replay_seed': config.replay_seed,
    }
    if config.n is not None:
        return run_suite(default_trial_config(config.shape, **options))
    return combine_reports(run_suite(cfg) for cfg in default_plan(**options))


def _module_element(config):
    return ModuleElement.from_entries(config.shape, config.entries)


def _emit(text, config, stdout):
    if config.output_path:
        with open(config.output_path, 'w', encoding='utf-8') as handle:
            handle.write(text + "\n")
    else:
        stdout.write(text + "\n")


def run(config, stdout=None, stderr=None):
    """
    Ejecuta el subcomando y devuelve el código de salida.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if config.command == 'verify':
            report = run_verify(config)
            _emit(render_json(SuiteReportSerializer(report).data), config, stdout)
            return EXIT_OK if report.passed else EXIT_VIOLATION

        radius_cfg = _radius_cfg(config, settings.OMEGALAB['GRID_POINTS'])
        if config.command == 'omega':
            payload = RadiusResultSerializer(omega(_module_element(config), radius_cfg)).data
        elif config.command == 'wradius':
            mat = np.asarray(config.entries, dtype=np.complex128).reshape(config.n, config.n)
            payload = RadiusResultSerializer(numerical_radius(mat, radius_cfg)).data
        else:
            payload = ProfileSerializer(omega(_module_element(config), radius_cfg, keep_profile=True)).data
        _emit(render_json(payload), config, stdout)
        return EXIT_OK
    except (OmegaLabError, serializers.ValidationError) as exc:
        logger.error("Configuración inválida en %s: %s", config.command, exc)
        stderr.write(_("Error de configuración: %(error)s") % {"error": exc} + "\n")
        return EXIT_USAGE
    except OSError as exc:
        logger.error("Error de E/S en %s: %s", config.command, exc)
        stderr.write(_("Error de E/S: %(error)s") % {"error": exc} + "\n")
        return EXIT_USAGE

