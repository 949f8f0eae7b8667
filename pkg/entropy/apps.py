from django.apps import AppConfig

class EntropyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'entropy'
