from django.db import models


class AnalysisRun(models.Model):
    """
    One recorded `analyze` run: the input pattern, the resolved analysis
    config, per-stage wall times and the class counts it produced.
    """
    pattern_path = models.CharField(max_length=512)
    pattern_sha256 = models.CharField(max_length=64)
    engine_version = models.CharField(max_length=32)
    mode = models.CharField(max_length=16)
    window = models.IntegerField(help_text="Window length T in generations")
    config = models.JSONField(default=dict)
    stage_seconds = models.JSONField(default=dict)
    class_counts = models.JSONField(default=dict)
    changed_cells = models.BigIntegerField(default=0)
    boundary_contacts = models.IntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f"Run {self.pk}: {self.pattern_path} ({self.mode}, T={self.window})"


class RunOutput(models.Model):
    """A file written by a run, with its content hash."""
    run = models.ForeignKey(AnalysisRun, on_delete=models.CASCADE, related_name='outputs')
    name = models.CharField(max_length=128)
    path = models.CharField(max_length=512)
    sha256 = models.CharField(max_length=64)

    class Meta:
        ordering = ['name']

    def __str__(self):
        return f"{self.name} {self.sha256[:12]}"
