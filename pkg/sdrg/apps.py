from django.apps import AppConfig

class SdrgConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'sdrg'
