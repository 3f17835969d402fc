"""
Django settings for the silhouette projection matching project.

There is no database and no web surface: Django provides the command
line (manage.py subcommands), configuration and the test runner.
Every tunable can be overridden through the environment or a .env file.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')

# Only used for signing, which nothing here does
SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'silhouette-match-local')

DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'reconstruction',
]

DATABASES = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


def _env(name, default, cast=str):
    return cast(os.getenv(f'PM_{name}', default))


# Defaults for every subcommand flag
PROJECTION_MATCHING = {
    'STEPS': _env('STEPS', 20000, int),
    'LEARNING_RATE': _env('LEARNING_RATE', 1e-4, float),
    'ADAM_BETA1': _env('ADAM_BETA1', 0.9, float),
    'ADAM_BETA2': _env('ADAM_BETA2', 0.999, float),
    'ADAM_EPS': _env('ADAM_EPS', 1e-8, float),
    'K': _env('K', 5000, int),
    'THRESHOLD': _env('THRESHOLD', 0.5, float),
    'SEED': _env('SEED', 0, int),
    'LOG_EVERY': _env('LOG_EVERY', 100, int),
    'VIEWS': _env('VIEWS', 5, int),
    'RESOLUTION': _env('RESOLUTION', 64, int),
    'POINTS': _env('POINTS', 2048, int),
    'CAMERA_RADIUS': _env('CAMERA_RADIUS', 2.0, float),
    'WORKERS': _env('WORKERS', 1, int),
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'reconstruction': {
            'handlers': ['console'],
            'level': os.getenv('PM_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
