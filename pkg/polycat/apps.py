from django.apps import AppConfig


class PolycatConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'polycat'
    verbose_name = 'Polynomial monad classifiers'
