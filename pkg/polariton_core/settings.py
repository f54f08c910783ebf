"""
Django settings for polariton_core project.
Numerical configuration for the dipole-lattice light-matter toolkit.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='polariton-insecure-local-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    # Third-party apps
    'rest_framework',

    # Local apps
    'lattice.apps.LatticeConfig',
    'hp_algebra.apps.HpAlgebraConfig',
    'hamiltonians.apps.HamiltoniansConfig',
    'bogoliubov.apps.BogoliubovConfig',
    'dispersion.apps.DispersionConfig',
    'meanfield.apps.MeanfieldConfig',
    'expdata.apps.ExpdataConfig',
    'polariton_core.apps.PolaritonCoreConfig',
]

# No persistence layer: every computation is a pure function of its inputs
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'polariton',
        'KEY_PREFIX': 'polariton',
        'TIMEOUT': config('CACHE_TIMEOUT', default=3600, cast=int),
    }
}

REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': (),
    'DEFAULT_PERMISSION_CLASSES': (),
    'UNAUTHENTICATED_USER': None,
}

# Logging Configuration
LOG_LEVEL = config('LOG_LEVEL', default='INFO')
LOG_FILE = config('LOG_FILE', default='')

_log_handlers = ['console']

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {},
}

if LOG_FILE:
    LOGGING['handlers']['file'] = {
        'level': LOG_LEVEL,
        'class': 'logging.handlers.RotatingFileHandler',
        'filename': LOG_FILE,
        'maxBytes': 1024 * 1024 * 15,  # 15MB
        'backupCount': 10,
        'formatter': 'verbose',
    }
    _log_handlers.append('file')

for _name in ('django', 'polariton_core', 'lattice', 'hp_algebra', 'hamiltonians',
              'bogoliubov', 'dispersion', 'meanfield', 'expdata'):
    LOGGING['loggers'][_name] = {
        'handlers': _log_handlers,
        'level': LOG_LEVEL,
        'propagate': False,
    }

# Numerical tolerances (reduced units, omega0 = 1)
FORM_SYMMETRY_TOLERANCE = config('FORM_SYMMETRY_TOLERANCE', default=1e-12, cast=float)
PAIRING_TOLERANCE = config('PAIRING_TOLERANCE', default=1e-10, cast=float)
ZERO_MODE_TOLERANCE = config('ZERO_MODE_TOLERANCE', default=1e-9, cast=float)
DEGENERACY_TOLERANCE = config('DEGENERACY_TOLERANCE', default=1e-8, cast=float)
ALGEBRA_TOLERANCE = config('ALGEBRA_TOLERANCE', default=1e-13, cast=float)
ORTHONORMAL_TOLERANCE = config('ORTHONORMAL_TOLERANCE', default=1e-12, cast=float)

# Lattice sums
MU_MAX_CUTOFF = config('MU_MAX_CUTOFF', default=2 ** 14, cast=int)
MU_INITIAL_CUTOFF = config('MU_INITIAL_CUTOFF', default=16, cast=int)
LATTICE_CHECKPOINTS = config('LATTICE_CHECKPOINTS', default=24, cast=int)

# Root finding
BISECTION_XTOL = config('BISECTION_XTOL', default=1e-12, cast=float)
CRITICAL_SCAN_MAX_ETA = config('CRITICAL_SCAN_MAX_ETA', default=10.0, cast=float)
CRITICAL_SCAN_POINTS = config('CRITICAL_SCAN_POINTS', default=2000, cast=int)
LAYER_POLE_OFFSET = config('LAYER_POLE_OFFSET', default=1e-9, cast=float)
ROOT_RESIDUAL_TOLERANCE = config('ROOT_RESIDUAL_TOLERANCE', default=1e-10, cast=float)

# Mean-field solver
MEANFIELD_STARTS = config('MEANFIELD_STARTS', default=50, cast=int)
MEANFIELD_SEED = config('MEANFIELD_SEED', default=0, cast=int)
MEANFIELD_XTOL = config('MEANFIELD_XTOL', default=1e-12, cast=float)

# Measurement comparison defaults
DEFAULT_OMEGA0_EV = config('DEFAULT_OMEGA0_EV', default=1.83, cast=float)
DEFAULT_EPSILON_M = config('DEFAULT_EPSILON_M', default=1.96, cast=float)
DEFAULT_ETA_PRIME = config('DEFAULT_ETA_PRIME', default=1.83, cast=float)

# Output
CSV_FLOAT_FORMAT = config('CSV_FLOAT_FORMAT', default='%.12g')
