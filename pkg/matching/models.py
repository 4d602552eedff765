from django.db import models


class SolveLog(models.Model):
    """Structured log of solver runs for later comparison and debugging."""

    ALGORITHM_CHOICES = [
        ('auction', 'ε-scaling auction'),
        ('gk', 'Goldberg & Kennedy'),
        ('gk-lean', 'Goldberg & Kennedy (lean)'),
        ('hungarian', 'Hungarian'),
    ]
    SOURCE_CHOICES = [
        ('solve', 'solve command'),
        ('verify', 'verify command'),
        ('bench', 'bench run'),
    ]

    algorithm = models.CharField(max_length=20, choices=ALGORITHM_CHOICES)
    source = models.CharField(max_length=20, choices=SOURCE_CHOICES, default='solve')
    instance_label = models.CharField(max_length=255, blank=True, default='',
                                      help_text="Instance file or bench cell the solve ran on")
    n = models.IntegerField(default=0)
    s = models.IntegerField(default=0)
    m = models.IntegerField(default=0)
    weight = models.BigIntegerField(null=True, blank=True)
    oracle_weight = models.BigIntegerField(null=True, blank=True)
    phases = models.IntegerField(default=0)
    steps = models.BigIntegerField(default=0, help_text="Bids, double pushes or augmentations")
    latency_ms = models.IntegerField(default=0, help_text="Solve time in milliseconds")
    success = models.BooleanField(default=True)
    failure_reason = models.CharField(max_length=200, blank=True, default='')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = "Solve Log"
        verbose_name_plural = "Solve Logs"

    def __str__(self):
        status = "OK" if self.success else "FAIL"
        return f"[{status}] {self.get_algorithm_display()} n={self.n} s={self.s} – {self.created_at:%Y-%m-%d %H:%M}"
