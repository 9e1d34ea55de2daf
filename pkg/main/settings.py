"""
Django settings for the framed-moduli project.

The project has no database and no web surface: everything runs through the
management commands of the ``moduli`` app.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-moduli-desk-scale-only')

DEBUG = os.getenv('DEBUG', 'False').lower() in ['true', '1', 'on', 'yes']

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'rest_framework',
    'moduli',
]

MIDDLEWARE = []

# No models are persisted; management commands and SimpleTestCase need no database
DATABASES = {}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Numerical policy for the moduli app
MODULI = {
    'RANK_TOL': float(os.getenv('MODULI_RANK_TOL', '1e-8')),  # relative SVD cutoff
    'RESIDUAL_TOL': float(os.getenv('MODULI_RESIDUAL_TOL', '1e-9')),
    'EIGEN_CLUSTER_TOL': float(os.getenv('MODULI_EIGEN_CLUSTER_TOL', '1e-7')),
    'PLUCKER_CAP': int(os.getenv('MODULI_PLUCKER_CAP', '1000000')),
    'DEFAULT_SEED': int(os.getenv('MODULI_DEFAULT_SEED', '0')),
    'IRREDUCIBILITY_WORDS': int(os.getenv('MODULI_IRREDUCIBILITY_WORDS', '64')),
}

# Django REST Framework Configuration (serializers and JSON rendering only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'DEFAULT_PARSER_CLASSES': [
        'rest_framework.parsers.JSONParser',
    ],
}

# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
        'moduli': {
            'handlers': ['console'],
            'level': os.getenv('MODULI_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
