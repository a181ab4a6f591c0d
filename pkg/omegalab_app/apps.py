from django.apps import AppConfig

class OmegaLabAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'omegalab_app'
    verbose_name = 'OmegaLab – radio numérico en módulos de Hilbert'
