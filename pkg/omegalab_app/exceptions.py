from django.utils.translation import gettext as _

# ==========================================================================
# EXCEPTIONS – OmegaLab App
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Errores de dominio de los servicios numéricos. Todos heredan
#              de ValueError para que el código que ya captura ValueError
#              siga funcionando.
# ==========================================================================

class OmegaLabError(ValueError):
    """
    Error base de OmegaLab. Cada subclase trae un mensaje por defecto.
    """
    def __init__(self, message=None):
        super().__init__(message or self.get_default_message())

    def get_default_message(self):
        return _("Error en el cálculo de OmegaLab.")


class ShapeMismatch(OmegaLabError):
    def get_default_message(self):
        return _("Las dimensiones de los operandos no son compatibles.")


class NotSquare(OmegaLabError):
    def get_default_message(self):
        return _("La matriz debe ser cuadrada.")


class NotHermitian(OmegaLabError):
    def get_default_message(self):
        return _("La matriz no es hermítica dentro de la tolerancia.")


class NegativeEntry(OmegaLabError):
    def get_default_message(self):
        return _("Las entradas de la matriz simétrica 2x2 deben ser no negativas.")


class ZeroDimension(OmegaLabError):
    def get_default_message(self):
        return _("Las dimensiones deben ser enteros positivos.")


class NotUnitModulus(OmegaLabError):
    def get_default_message(self):
        return _("El escalar lambda debe tener módulo uno.")


class NonFiniteEntry(OmegaLabError):
    def get_default_message(self):
        return _("La matriz contiene entradas NaN o infinitas.")


class InvalidConfig(OmegaLabError):
    def get_default_message(self):
        return _("La configuración numérica no es válida.")
