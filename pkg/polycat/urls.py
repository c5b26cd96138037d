from django.urls import path
from . import views

urlpatterns = [
    # Archived runs
    path('runs/', views.run_list, name='run_list'),
    path('runs/<int:run_id>/', views.run_detail, name='run_detail'),

    # Analyses
    path('analyze/', views.analyze_view, name='analyze'),

    # Stored definitions
    path('monads/', views.monad_list, name='monad_list'),
]
