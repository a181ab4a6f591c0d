from pathlib import Path
from decouple import config
from OmegaLab.omegalab_config import OMEGALAB

# ==========================================================================
# SETTINGS BASE – OmegaLab
# Idioma: Código en inglés / Comentarios y mensajes en español
# Descripción: Configuración base del proyecto OmegaLab. No hay servicios de
#              red: el proyecto se usa a través de manage.py (comando radius)
#              y de la suite de tests.
# ==========================================================================
# --------------------------------------------------------------------------
# Base Directory
# --------------------------------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# --------------------------------------------------------------------------
# Seguridad y claves secretas
# --------------------------------------------------------------------------
# La clave solo firma datos internos de Django; la CLI no requiere variables de entorno.
SECRET_KEY = config("SECRET_KEY", default="omegalab-local-only-key")
DEBUG = config('DEBUG', default=False, cast=bool)
ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost").split(",")

# --------------------------------------------------------------------------
# Aplicaciones instaladas
# --------------------------------------------------------------------------
INSTALLED_APPS = [
    # Django apps
    'django.contrib.contenttypes',
    'django.contrib.auth',

    # Terceros
    'rest_framework',

    # Propias
    'omegalab_app',
]

# --------------------------------------------------------------------------
# Base de datos (no se usa en los cálculos; SQLite para que manage.py funcione)
# --------------------------------------------------------------------------
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('OMEGALAB_DB_PATH', default=str(BASE_DIR / 'omegalab.sqlite3')),
    }
}

# --------------------------------------------------------------------------
# Internacionalización y zona horaria
# --------------------------------------------------------------------------
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'America/Montevideo'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# --------------------------------------------------------------------------
# REST Framework – solo serializadores y renderizado JSON
# --------------------------------------------------------------------------
REST_FRAMEWORK = {
    'STRICT_JSON': True,
    'UNICODE_JSON': True,
    'COMPACT_JSON': False,
}

# --------------------------------------------------------------------------
# LOGGING – Para monitoreo y debugging
# --------------------------------------------------------------------------
# La salida estándar queda reservada para los reportes JSON: solo archivo.
LOG_LEVEL = config('OMEGALAB_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'logfile': {
            'level': 'DEBUG',
            'class': 'logging.handlers.TimedRotatingFileHandler',
            'filename': config('OMEGALAB_LOG_FILE', default='omegalab.log'),
            'when': 'midnight',
            'backupCount': 5,
            'formatter': 'verbose',
            'delay': True,  # se agrega para retrasar la apertura del archivo
        },
    },
    'loggers': {
        'django': {
            'handlers': ['logfile'],
            'level': 'WARNING',
            'propagate': True,
        },
        'omegalab_app': {
            'handlers': ['logfile'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
