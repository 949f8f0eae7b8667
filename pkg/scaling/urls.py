from django.urls import path
from . import views

urlpatterns = [
    path('', views.list_fits, name='list_fits'),
]
