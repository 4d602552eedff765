from django.contrib import admin

from .models import SolveLog


@admin.register(SolveLog)
class SolveLogAdmin(admin.ModelAdmin):
    list_display = ('created_at', 'algorithm', 'source', 'instance_label', 'n', 's', 'm',
                    'weight', 'latency_ms', 'success', 'failure_reason')
    list_filter = ('success', 'algorithm', 'source', 'created_at')
    search_fields = ('instance_label', 'failure_reason')
    readonly_fields = ('created_at',)
    ordering = ('-created_at',)
