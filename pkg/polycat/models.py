from django.db import models
from django.core.validators import MinValueValidator


class MonadRecord(models.Model):
    """
    A monad definition document kept for later runs
    """
    name = models.CharField(max_length=100, unique=True, help_text="Name used on the command line")
    text = models.TextField(help_text="Pipeline line or YAML definition")
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['name']

    def __str__(self):
        return self.name


class AnalysisRun(models.Model):
    """
    Archive of one engine run: what was asked, the verdict, and the
    artifacts exactly as written
    """
    COMMAND_CHOICES = [
        ('analyze', 'analyze'),
        ('classifier', 'classifier'),
        ('pushout', 'pushout'),
        ('free', 'free'),
        ('gr', 'gr'),
        ('plus', 'plus'),
        ('verify', 'verify'),
    ]
    EXIT_CHOICES = [
        (0, 'ok'),
        (1, 'error'),
        (2, 'refuted'),
        (3, 'unknown'),
    ]

    monad = models.ForeignKey(MonadRecord, on_delete=models.SET_NULL, null=True, blank=True, related_name='runs')
    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    monad_spec = models.CharField(max_length=255, blank=True, help_text="Pipeline or file the monad came from")
    kind = models.CharField(max_length=20, blank=True, help_text="Classifier kind, e.g. T+1")
    max_degree = models.IntegerField(validators=[MinValueValidator(0)], default=2)
    max_xdeg = models.IntegerField(validators=[MinValueValidator(0)], default=3)
    seed = models.IntegerField(default=0)
    verdict = models.CharField(max_length=40, blank=True)
    exit_code = models.IntegerField(choices=EXIT_CHOICES, default=0)
    summary = models.TextField(blank=True)
    artifacts = models.JSONField(default=dict, help_text="File name to artifact text")
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.command} {self.monad_spec or '-'} -> {self.get_exit_code_display()}"

    def is_refutation(self):
        """A negative mathematical verdict, still a successful run"""
        return self.exit_code == 2

    @classmethod
    def record(cls, command, result, monad_spec="", kind="", cfg=None, monad=None):
        """Store a RunResult"""
        return cls.objects.create(
            monad=monad,
            command=command,
            monad_spec=monad_spec,
            kind=kind,
            max_degree=cfg.truncation.max_degree if cfg else 0,
            max_xdeg=cfg.truncation.max_xdeg if cfg else 0,
            seed=cfg.seed if cfg else 0,
            verdict=result.verdict,
            exit_code=result.exit_code,
            summary="\n".join(result.summary),
            artifacts=dict(result.artifacts),
        )
