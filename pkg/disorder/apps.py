from django.apps import AppConfig

class DisorderConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'disorder'
