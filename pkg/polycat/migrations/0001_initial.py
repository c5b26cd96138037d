# Generated by Django 5.2.5 on 2026-10-19 12:40

import django.core.validators
import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='MonadRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(help_text='Name used on the command line', max_length=100, unique=True)),
                ('text', models.TextField(help_text='Pipeline line or YAML definition')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'ordering': ['name'],
            },
        ),
        migrations.CreateModel(
            name='AnalysisRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('analyze', 'analyze'), ('classifier', 'classifier'), ('pushout', 'pushout'), ('free', 'free'), ('gr', 'gr'), ('plus', 'plus'), ('verify', 'verify')], max_length=20)),
                ('monad_spec', models.CharField(blank=True, help_text='Pipeline or file the monad came from', max_length=255)),
                ('kind', models.CharField(blank=True, help_text='Classifier kind, e.g. T+1', max_length=20)),
                ('max_degree', models.IntegerField(default=2, validators=[django.core.validators.MinValueValidator(0)])),
                ('max_xdeg', models.IntegerField(default=3, validators=[django.core.validators.MinValueValidator(0)])),
                ('seed', models.IntegerField(default=0)),
                ('verdict', models.CharField(blank=True, max_length=40)),
                ('exit_code', models.IntegerField(choices=[(0, 'ok'), (1, 'error'), (2, 'refuted'), (3, 'unknown')], default=0)),
                ('summary', models.TextField(blank=True)),
                ('artifacts', models.JSONField(default=dict, help_text='File name to artifact text')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('monad', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='runs', to='polycat.monadrecord')),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
