import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='AnalysisRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('pattern_path', models.CharField(max_length=512)),
                ('pattern_sha256', models.CharField(max_length=64)),
                ('engine_version', models.CharField(max_length=32)),
                ('mode', models.CharField(max_length=16)),
                ('window', models.IntegerField(help_text='Window length T in generations')),
                ('config', models.JSONField(default=dict)),
                ('stage_seconds', models.JSONField(default=dict)),
                ('class_counts', models.JSONField(default=dict)),
                ('changed_cells', models.BigIntegerField(default=0)),
                ('boundary_contacts', models.IntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
        migrations.CreateModel(
            name='RunOutput',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=128)),
                ('path', models.CharField(max_length=512)),
                ('sha256', models.CharField(max_length=64)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='outputs', to='main.analysisrun')),
            ],
            options={
                'ordering': ['name'],
            },
        ),
    ]
