from django.urls import path, include

urlpatterns = [
    path('api/v1/runs/', include('ensemble.urls')),
    path('api/v1/fits/', include('scaling.urls')),
]
