"""
Run one report command from a JobConfig file.

    {"command": "zjl", "gcm": [[2,-2],[-2,2]], "field": {"char": 3},
     "truncation": {"height": 6}, "options": {}, "out": "zjl.json"}
"""
import json
import os

from django.core.management import call_command, load_command_class
from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers as drf

from exact_app.errors import KMForgeError
from reports_app.base import INVALID, load_json_argument, validated
from reports_app.serializers import JobConfigSerializer

LIST_OPTIONS = {'pair', 'delta', 'subset', 'embedding'}
JSON_OPTIONS = {'source', 'target', 'betas', 'other'}


def command_options(config) -> dict:
    """Translate a validated JobConfig into ``call_command`` keyword arguments."""
    command = load_command_class('reports_app', config['command'])
    kwargs = {}
    if command.takes_gcm:
        if 'gcm' not in config:
            raise CommandError(f"{config['command']} needs a gcm", returncode=INVALID)
        gcm = config['gcm']
        kwargs['gcm'] = gcm if isinstance(gcm, str) else json.dumps(gcm)
    if 'field' in config:
        kwargs['char'] = config['field']['char']
    if 'truncation' in config:
        key = 'max' if config['command'] == 'serre_dims' else 'height'
        kwargs[key] = config['truncation']['height']
    for name, value in config.get('options', {}).items():
        name = name.replace('-', '_')
        if name in LIST_OPTIONS and isinstance(value, list):
            value = ','.join(str(v) for v in value)
        elif name in JSON_OPTIONS and not isinstance(value, str):
            value = json.dumps(value)
        kwargs[name] = value
    if config.get('out'):
        kwargs['out'] = config['out']
    return kwargs


class Command(BaseCommand):
    help = 'Validate a JobConfig JSON file and run the command it names'

    def add_arguments(self, parser):
        parser.add_argument('--config', type=str, required=True, help='Path to the JobConfig JSON file')

    def handle(self, *args, **options):
        path = options['config']
        if not os.path.isfile(path):
            raise CommandError(f"Job config not found: {path}", returncode=INVALID)
        try:
            config = validated(JobConfigSerializer, load_json_argument(path, 'config'))
        except (drf.ValidationError, KMForgeError) as e:
            detail = e.as_dict() if isinstance(e, KMForgeError) else e.detail
            self.stderr.write(json.dumps({"error": {"code": "invalid_job", "details": detail}}, default=str))
            raise CommandError(f"invalid job config {path}", returncode=INVALID) from e
        kwargs = command_options(config)
        job = os.path.splitext(os.path.basename(path))[0]
        self.stderr.write(f"running {config['command']} for job {job}")
        call_command(config['command'], job=job, stdout=self.stdout, stderr=self.stderr, **kwargs)
