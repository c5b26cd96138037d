"""Admin plus the polycat JSON endpoints at the root"""
from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path('admin/', admin.site.urls),
    path('', include('polycat.urls')),
]
