# Generated by Django 4.2.30 on 2026-10-16 09:41

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SolveLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('algorithm', models.CharField(choices=[('auction', 'ε-scaling auction'), ('gk', 'Goldberg & Kennedy'), ('gk-lean', 'Goldberg & Kennedy (lean)'), ('hungarian', 'Hungarian')], max_length=20)),
                ('source', models.CharField(choices=[('solve', 'solve command'), ('verify', 'verify command'), ('bench', 'bench run')], default='solve', max_length=20)),
                ('instance_label', models.CharField(blank=True, default='', help_text='Instance file or bench cell the solve ran on', max_length=255)),
                ('n', models.IntegerField(default=0)),
                ('s', models.IntegerField(default=0)),
                ('m', models.IntegerField(default=0)),
                ('weight', models.BigIntegerField(blank=True, null=True)),
                ('oracle_weight', models.BigIntegerField(blank=True, null=True)),
                ('phases', models.IntegerField(default=0)),
                ('steps', models.BigIntegerField(default=0, help_text='Bids, double pushes or augmentations')),
                ('latency_ms', models.IntegerField(default=0, help_text='Solve time in milliseconds')),
                ('success', models.BooleanField(default=True)),
                ('failure_reason', models.CharField(blank=True, default='', max_length=200)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Solve Log',
                'verbose_name_plural': 'Solve Logs',
                'ordering': ['-created_at'],
            },
        ),
    ]
