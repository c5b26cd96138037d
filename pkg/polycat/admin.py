from django.contrib import admin
from .models import MonadRecord, AnalysisRun


@admin.register(MonadRecord)
class MonadRecordAdmin(admin.ModelAdmin):
    """
    Admin interface for stored monad definitions
    """
    list_display = ['name', 'created_at', 'updated_at']
    search_fields = ['name', 'text']
    readonly_fields = ['created_at', 'updated_at']


@admin.register(AnalysisRun)
class AnalysisRunAdmin(admin.ModelAdmin):
    """
    Admin interface for archived runs
    """
    list_display = ['command', 'monad_spec', 'kind', 'max_degree', 'max_xdeg', 'verdict', 'exit_code', 'created_at']
    list_filter = ['command', 'exit_code', 'created_at']
    search_fields = ['monad_spec', 'verdict', 'summary']
    readonly_fields = ['created_at', 'artifacts']
