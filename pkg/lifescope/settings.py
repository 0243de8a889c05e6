"""
Django settings for the LifeScope project.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get('LIFESCOPE_SECRET_KEY', 'lifescope-local-only')

DEBUG = False

ALLOWED_HOSTS = []

INSTALLED_APPS = [
    'main',
]

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('LIFESCOPE_DB', BASE_DIR / 'db.sqlite3'),
    }
}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s [%(name)s] %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'lifescope': {
            'handlers': ['console'],
            'level': os.environ.get('LIFESCOPE_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
