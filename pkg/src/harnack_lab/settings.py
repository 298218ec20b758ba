"""
Django settings for the harnack_lab project.

The project has no web surface: Django provides settings, the ORM for the
experiment-run ledger, management commands and the test runner, and celery
executes the runs.
"""

import os
from pathlib import Path

import environ


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


env = environ.Env(
    # set casting, default value
    DEBUG=(bool, False),
    SECRET_KEY=(str, 'harnack-lab-development-key'),
    DATABASE_URL=(str, f'sqlite:///{BASE_DIR / ".." / "db.sqlite3"}'),
    DJANGO_LOG_LEVEL=(str, 'INFO'),
    LAB_LOG_LEVEL=(str, 'INFO'),
    CELERY_BROKER_URL=(str, ''),
    CELERY_RESULT_BACKEND=(str, 'django-db'),
    CELERY_TASK_ALWAYS_EAGER=(bool, True),
    LAB_OUTPUT_DIR=(str, os.path.join(BASE_DIR, '..', 'results')),
    LAB_DEFAULT_SPACING=(float, 0.01),
    LAB_P_E_FRACTION=(float, 0.75),
    LAB_EPSILON=(float, 0.5),
    LAB_VIOLATION_TOLERANCE=(float, 1e-3),
    LAB_HARNACK_C0=(float, 2.0),
    LAB_LOCAL_MAX_C=(float, 1.0),
    LAB_LANDIS_C0=(float, 1.0),
    LAB_PECLET_THRESHOLD=(float, 2.0),
    LAB_NEWTON_DERIVATIVE_CAP=(float, 1e6),
    LAB_SOLVER_MAX_ITERATIONS=(int, 200),
)

# read environ variables from .env file
environ.Env.read_env(
    os.environ.get('DOTENV_FILE', os.path.join(BASE_DIR, '..', '.env'))
)

DEBUG = env('DEBUG')

SECRET_KEY = env('SECRET_KEY')

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'rest_framework',
    'django_celery_results',
    'common',
    'grid',
    'operators',
    'solver',
    'harnack',
    'smp',
    'landis',
    'experiments',
]

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': env('LAB_LOG_LEVEL'),
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': env('DJANGO_LOG_LEVEL'),
            'propagate': False,
        },
    },
}

# Database
# https://docs.djangoproject.com/en/5.0/ref/settings/#databases
DATABASES = {
    'default': env.db('DATABASE_URL'),
}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# django-rest-framework is only used for its serializers (config validation)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}

STORAGES = {
    'default': {
        'BACKEND': 'django.core.files.storage.FileSystemStorage',
    },
    'reports': {
        'BACKEND': 'django.core.files.storage.FileSystemStorage',
        'OPTIONS': {
            'location': env('LAB_OUTPUT_DIR'),
        },
    },
}

# celery settings
CELERY_BROKER_URL = env('CELERY_BROKER_URL')
CELERY_RESULT_BACKEND = env('CELERY_RESULT_BACKEND')
CELERY_TASK_ALWAYS_EAGER = env('CELERY_TASK_ALWAYS_EAGER')
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_ACCEPT_CONTENT = ['json']

# lab settings
LAB_OUTPUT_DIR = env('LAB_OUTPUT_DIR')
LAB_DEFAULT_SPACING = env('LAB_DEFAULT_SPACING')

# p_E is only known to lie in (n/2, n); it is taken
# as this fraction of n
LAB_P_E_FRACTION = env('LAB_P_E_FRACTION')

# default exponent of the weak Harnack integral (∫ u^ε)^(1/ε)
LAB_EPSILON = env('LAB_EPSILON')

# an inequality is reported as violated only when it fails by a factor larger
# than 1 + LAB_VIOLATION_TOLERANCE
LAB_VIOLATION_TOLERANCE = env('LAB_VIOLATION_TOLERANCE')

# calibrated constants, see `harnack.calibration` and `landis.oracle`
LAB_HARNACK_C0 = env('LAB_HARNACK_C0')
LAB_LOCAL_MAX_C = env('LAB_LOCAL_MAX_C')
LAB_LANDIS_C0 = env('LAB_LANDIS_C0')

# first-order terms switch from centered to one-sided differences above this
# cell Péclet number
LAB_PECLET_THRESHOLD = env('LAB_PECLET_THRESHOLD')

# Newton falls back to a Picard (secant through the origin) row wherever the
# numerical derivative of the nonlinearity exceeds this magnitude
LAB_NEWTON_DERIVATIVE_CAP = env('LAB_NEWTON_DERIVATIVE_CAP')
LAB_SOLVER_MAX_ITERATIONS = env('LAB_SOLVER_MAX_ITERATIONS')
