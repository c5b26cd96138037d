import os
import dj_database_url

from pathlib import Path
from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')


# Secrets and hosts come from the environment or .env
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-polycat-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'polycat',  # Classifier and filtration engine
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'Tame_Monads.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'Tame_Monads.wsgi.application'


# Database: DATABASE_URL, SQLite in the project directory otherwise

DATABASES = {
    'default': dj_database_url.config(
        default=os.getenv('DATABASE_URL', f"sqlite:///{BASE_DIR / 'db.sqlite3'}"))
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Admin static files
STATIC_URL = '/static/'
STATIC_ROOT = BASE_DIR / "staticfiles"

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
# One JSON object per line on stderr; `extra` fields become keys.

LOG_LEVEL = os.getenv('POLYCAT_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'json': {
            '()': 'pythonjsonlogger.json.JsonFormatter',
            'fmt': '%(asctime)s %(levelname)s %(name)s %(message)s',
            'rename_fields': {'levelname': 'level', 'asctime': 'time'},
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'formatter': 'json',
        },
    },
    'loggers': {
        'polycat': {
            'handlers': ['stderr'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'django': {
            'handlers': ['stderr'],
            'level': 'WARNING',
        },
    },
}


# Engine defaults
# Command-line flags override these; the environment overrides the defaults.

POLYCAT = {
    'DEGREE': int(os.getenv('POLYCAT_DEGREE', '2')),
    'XDEG': int(os.getenv('POLYCAT_XDEG', '3')),
    'BUDGET': int(os.getenv('POLYCAT_BUDGET', '20000')),
    'QUOTIENT_SEARCH': int(os.getenv('POLYCAT_QUOTIENT_SEARCH', '4000')),
    'FORMAT': os.getenv('POLYCAT_FORMAT', 'json'),
    'SEED': int(os.getenv('POLYCAT_SEED', '0')),
    'RECORD_RUNS': os.getenv('POLYCAT_RECORD_RUNS', 'False') == 'True',
}
