from django.urls import path
from . import views

urlpatterns = [
    path('', views.list_runs, name='list_runs'),
    path('<int:run_id>', views.run_detail, name='run_detail'),
]
