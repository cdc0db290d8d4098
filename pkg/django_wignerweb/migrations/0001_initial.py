import collections
import uuid

import django.db.models.deletion
import django.utils.timezone
import jsonfield.fields
import model_utils.fields
from django.db import migrations, models

import django_wignerweb.validators


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Experiment',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, verbose_name='created')),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, verbose_name='modified')),
                ('name', models.CharField(db_index=True, max_length=64, unique=True, validators=[django_wignerweb.validators.name_validator])),
                ('scenario', models.CharField(choices=[('fig1_unitary', 'fig1_unitary'), ('fig2_collapse', 'fig2_collapse'), ('fig3_snapshots', 'fig3_snapshots'), ('fig4_chi_scan', 'fig4_chi_scan'), ('custom', 'custom')], max_length=32, verbose_name='scenario')),
                ('config', jsonfield.fields.JSONField(blank=True, default=dict, dump_kwargs={'indent': 4}, help_text='experiment configuration in JSON format; omitted keys take the scenario defaults', load_kwargs={'object_pairs_hook': collections.OrderedDict}, verbose_name='configuration')),
                ('status', model_utils.fields.StatusField(choices=[(0, 'dummy')], default='pending', help_text='"pending" means the experiment has not been run yet; \n"running" means a run is in progress; \n"completed" means every artifact was written and listed in the manifest; \n"failed" means the last run raised an error, see the summary;', max_length=100, no_check_for_status=True, verbose_name='run status')),
                ('output_dir', models.CharField(blank=True, help_text='defaults to a directory named after the experiment inside WIGNERWEB_OUTPUT_DIR', max_length=255, verbose_name='output directory')),
                ('seed', models.PositiveIntegerField(default=0, verbose_name='seed')),
                ('summary', jsonfield.fields.JSONField(blank=True, default=dict, dump_kwargs={'indent': 4}, load_kwargs={'object_pairs_hook': collections.OrderedDict}, null=True, verbose_name='summary')),
            ],
            options={
                'verbose_name': 'experiment',
                'verbose_name_plural': 'experiments',
                'abstract': False,
            },
        ),
        migrations.CreateModel(
            name='Artifact',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created', model_utils.fields.AutoCreatedField(default=django.utils.timezone.now, verbose_name='created')),
                ('modified', model_utils.fields.AutoLastModifiedField(default=django.utils.timezone.now, verbose_name='modified')),
                ('path', models.CharField(help_text='relative to the output directory of the experiment', max_length=255, verbose_name='path')),
                ('kind', models.CharField(choices=[('series', 'series'), ('snapshot', 'snapshot'), ('heatmap', 'heatmap'), ('table', 'table'), ('fit', 'fit'), ('ensemble', 'ensemble')], max_length=16, verbose_name='kind')),
                ('scenario', models.CharField(max_length=32, verbose_name='scenario')),
                ('parameters', jsonfield.fields.JSONField(blank=True, default=dict, dump_kwargs={'indent': 4}, load_kwargs={'object_pairs_hook': collections.OrderedDict}, verbose_name='parameters')),
                ('checksum', models.CharField(max_length=32, validators=[django_wignerweb.validators.checksum_validator], verbose_name='checksum')),
                ('experiment', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='artifacts', to='django_wignerweb.experiment')),
            ],
            options={
                'verbose_name': 'artifact',
                'verbose_name_plural': 'artifacts',
                'ordering': ('created',),
                'abstract': False,
                'unique_together': {('experiment', 'path')},
            },
        ),
    ]
