from django.apps import AppConfig


class ExplicateConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "explicate"
    verbose_name = "Explicate orders"
