import uuid

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ScenarioRun",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("task_id", models.UUIDField(db_index=True, default=uuid.uuid4, editable=False, unique=True)),
                (
                    "kind",
                    models.CharField(
                        choices=[
                            ("ground_state", "Ground state"),
                            ("coherent", "Coherent state"),
                            ("free_packet", "Free packet"),
                            ("cubic", "Cubic potential"),
                            ("two_slit_preset", "Two-slit preset"),
                            ("lattice_demo", "Lattice demo"),
                            ("filter_demo", "Filter demo"),
                            ("spinor_demo", "Spinor demo"),
                        ],
                        max_length=32,
                    ),
                ),
                ("config", models.JSONField()),
                (
                    "status",
                    models.CharField(
                        choices=[("PROCESSING", "PROCESSING"), ("SUCCESS", "SUCCESS"), ("FAILED", "FAILED")],
                        default="PROCESSING",
                        max_length=100,
                    ),
                ),
                ("passed", models.BooleanField(blank=True, null=True)),
                ("report", models.JSONField(blank=True, null=True)),
                ("artifacts", models.JSONField(blank=True, null=True)),
                ("error", models.TextField(blank=True, default="")),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("updated_at", models.DateTimeField(auto_now=True)),
            ],
        ),
    ]
