"""WSGI entry point; `gunicorn Tame_Monads.wsgi` in deployment."""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'Tame_Monads.settings')

application = get_wsgi_application()
