import sys

from django.core.management.base import BaseCommand

from omegalab_app.services.cli_service import ENTRIES_HELP, add_cli_arguments, config_from_options, run

# ==========================================================================
# RADIUS – OmegaLab App (comando de manage.py)
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Punto de entrada `python manage.py radius <comando> [opciones]`.
#              La salida estándar lleva solo JSON; los errores de uso salen
#              con código 2 y las violaciones con código 1.
# ==========================================================================

class Command(BaseCommand):
    help = (
        "Verificación y cálculo del radio numérico Omega. "
        "Ej.: radius verify --n 2 --m 3 --trials 100 --seed 7 | "
        "radius omega --n 1 --m 2 --entries 1,0. " + ENTRIES_HELP
    )
    requires_system_checks = []
    requires_migrations_checks = False

    def add_arguments(self, parser):
        add_cli_arguments(parser)

    def handle(self, *args, **options):
        config = config_from_options(options)
        code = run(config, stdout=self.stdout, stderr=self.stderr)
        if code:
            sys.exit(code)
