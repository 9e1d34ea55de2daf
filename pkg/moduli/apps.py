from django.apps import AppConfig


class ModuliConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'moduli'
    verbose_name = 'Grassmannian framed moduli'
