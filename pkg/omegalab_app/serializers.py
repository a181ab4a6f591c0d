import math

from django.utils.translation import gettext as _
from rest_framework import serializers
from rest_framework.renderers import JSONRenderer

from omegalab_app.services.harness_service import CHECK_NAMES
from omegalab_app.services.linalg_service import UINT64_MAX

# ============================================================================
# SERIALIZERS – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Validación de la entrada de la CLI y representación JSON de los
#              resultados (RadiusResult, CheckOutcome, TrialConfig, SuiteReport).
#              El orden de declaración de los campos fija el orden de las claves.
# ============================================================================

COMMANDS = ('verify', 'omega', 'wradius', 'profile')


def finite_or_none(value):
    return float(value) if value is not None and math.isfinite(value) else None


def render_json(data):
    """
    JSON estricto, UTF-8, indentado con 2 espacios. Devuelve str. Cada float
    sale en la forma más corta que vuelve al mismo double (a lo sumo 17
    dígitos significativos).
    """
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8')


# ------------------------------------------------------------------------------
# Entradas de matrices: "re+imi" separados por coma, en orden por filas
# ------------------------------------------------------------------------------
def parse_entry(token):
    """
    '1+2i' -> (1+2j), '-i' -> -1j, '3' -> (3+0j). La unidad imaginaria es 'i'.
    """
    text = token.strip()
    if not text or 'j' in text.lower() or ' ' in text:
        raise serializers.ValidationError(_("Entrada inválida: '%(token)s'.") % {"token": token})
    if text.endswith('i'):
        body = text[:-1]
        if body in ('', '+', '-') or body.endswith(('+', '-')):
            body += '1'
        text = body + 'j'
    try:
        value = complex(text)
    except ValueError:
        raise serializers.ValidationError(_("Entrada inválida: '%(token)s'.") % {"token": token})
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise serializers.ValidationError(_("La entrada '%(token)s' no es finita.") % {"token": token})
    return value


def parse_entries(text):
    return tuple(parse_entry(token) for token in text.split(','))


# ------------------------------------------------------------------------------
# Configuración de la CLI
# ------------------------------------------------------------------------------
class CliConfigSerializer(serializers.Serializer):
    """
    Valida las opciones de `manage.py radius`. Los campos numéricos llegan
    como texto desde argparse; aquí se convierten y se acotan.
    """
    command = serializers.ChoiceField(choices=COMMANDS)
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    m = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    trials = serializers.IntegerField(required=False, allow_null=True)
    seed = serializers.IntegerField(min_value=0, max_value=UINT64_MAX, required=False, allow_null=True)
    tol = serializers.FloatField(required=False, allow_null=True)
    grid_points = serializers.IntegerField(required=False, allow_null=True)
    out = serializers.CharField(required=False, allow_null=True, allow_blank=False)
    check = serializers.CharField(required=False, allow_null=True)
    entries = serializers.CharField(required=False, allow_null=True)
    replay = serializers.IntegerField(min_value=0, max_value=UINT64_MAX, required=False, allow_null=True)

    def validate_trials(self, value):
        if value is not None and value < 1:
            raise serializers.ValidationError(_("trials debe ser al menos 1."))
        return value

    def validate_tol(self, value):
        if value is not None and not (math.isfinite(value) and value > 0):
            raise serializers.ValidationError(_("tol debe ser un número positivo."))
        return value

    def validate_grid_points(self, value):
        if value is not None and value < 8:
            raise serializers.ValidationError(_("grid_points debe ser al menos 8."))
        return value

    def validate_check(self, value):
        if value is None:
            return None
        names = tuple(name.strip() for name in value.split(',') if name.strip())
        unknown = [name for name in names if name not in CHECK_NAMES]
        if unknown or not names:
            raise serializers.ValidationError(
                _("Chequeos desconocidos: %(names)s. Opciones: %(options)s.")
                % {"names": ", ".join(unknown) or "-", "options": ", ".join(CHECK_NAMES)}
            )
        return names

    def validate_entries(self, value):
        return parse_entries(value) if value is not None else None

    def validate(self, data):
        command = data['command']
        n, m, entries = data.get('n'), data.get('m'), data.get('entries')

        if command == 'verify':
            if (n is None) != (m is None):
                raise serializers.ValidationError(_("verify requiere --n y --m juntos, o ninguno."))
            if data.get('replay') is not None and n is None:
                raise serializers.ValidationError(_("--replay requiere --n y --m."))
            return data

        if command == 'wradius':
            if n is None or entries is None:
                raise serializers.ValidationError(_("wradius requiere --n y --entries."))
            expected = n * n
        else:
            if n is None or m is None or entries is None:
                raise serializers.ValidationError(_("%(command)s requiere --n, --m y --entries.")
                                                  % {"command": command})
            expected = m * n
        if len(entries) != expected:
            raise serializers.ValidationError(_("Se esperaban %(want)s entradas, se recibieron %(got)s.")
                                              % {"want": expected, "got": len(entries)})
        return data


# ------------------------------------------------------------------------------
# Resultados del motor de radio
# ------------------------------------------------------------------------------
class RadiusResultSerializer(serializers.Serializer):
    value = serializers.FloatField()
    argmax_theta = serializers.FloatField()
    certificate = serializers.FloatField()
    evaluations = serializers.IntegerField()


class ProfileSerializer(serializers.Serializer):
    """
    Muestras (theta, objetivo) del perfil en lambda, para graficar fuera de OmegaLab.
    """
    value = serializers.FloatField()
    certificate = serializers.FloatField()
    samples = serializers.SerializerMethodField()

    def get_samples(self, obj):
        return [[float(theta), float(value)] for theta, value in obj.profile_samples or ()]


# ------------------------------------------------------------------------------
# Reporte de verificación
# ------------------------------------------------------------------------------
class ShapeSerializer(serializers.Serializer):
    n = serializers.IntegerField()
    m = serializers.IntegerField()


class RadiusConfigSerializer(serializers.Serializer):
    grid_points = serializers.IntegerField()
    refine_tol = serializers.FloatField()
    max_refine_iters = serializers.IntegerField()


class TrialConfigSerializer(serializers.Serializer):
    """
    Eco de la configuración efectiva. `workers` no se incluye: el contenido
    del reporte no depende de la cantidad de procesos.
    """
    shape = ShapeSerializer()
    trials = serializers.IntegerField()
    master_seed = serializers.IntegerField()
    tol = serializers.FloatField()
    radius_cfg = RadiusConfigSerializer()
    scale_samples = serializers.SerializerMethodField()
    checks = serializers.ListField(child=serializers.CharField(), allow_null=True)
    replay_seed = serializers.IntegerField(allow_null=True)

    def get_scale_samples(self, obj):
        return [[value.real, value.imag] for value in obj.scale_samples]


class CheckOutcomeSerializer(serializers.Serializer):
    name = serializers.CharField()
    trials = serializers.IntegerField()
    violations = serializers.IntegerField()
    worst_margin = serializers.SerializerMethodField()
    witness_seed = serializers.IntegerField(allow_null=True)

    def get_worst_margin(self, obj):
        # Sin desigualdades evaluadas (todas vacuas) el margen es infinito: se emite null
        return finite_or_none(obj.worst_margin)


class SuiteReportSerializer(serializers.Serializer):
    version = serializers.CharField()
    config = TrialConfigSerializer(many=True)
    outcomes = CheckOutcomeSerializer(many=True)
    passed = serializers.BooleanField()
