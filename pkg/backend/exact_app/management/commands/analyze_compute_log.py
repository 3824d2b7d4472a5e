"""
Management command to analyze slow computations from the compute log.
"""
import json
import os

import tabulate
from django.conf import settings
from django.core.management.base import BaseCommand

from exact_app.compute_logger import get_slow_computation_stats


class Command(BaseCommand):
    help = 'Analyze slow exact computations from the compute log'

    def add_arguments(self, parser):
        parser.add_argument('--min-time', type=float, default=None,
                            help='Minimum elapsed time in ms to include')
        parser.add_argument('--group-by', type=str, default='operation',
                            choices=['operation', 'command', 'error_type'],
                            help='Field to group computations by')
        parser.add_argument('--top', type=int, default=10, help='Number of top results to show')
        parser.add_argument('--output', type=str, default='table', choices=['table', 'json'],
                            help='Output format')
        parser.add_argument('--log-file', type=str, default=None,
                            help='Path to log file (uses configured value if not specified)')

    def handle(self, *args, **options):
        log_file = options['log_file']
        if not log_file:
            log_file = getattr(settings, 'KMFORGE_COMPUTE_LOGGING', {}).get('log_file')
            if log_file and not os.path.isabs(log_file):
                log_file = os.path.join(settings.BASE_DIR, log_file)

        if not log_file or not os.path.exists(log_file):
            self.stderr.write(self.style.ERROR(f"Log file not found: {log_file}"))
            return

        stats = get_slow_computation_stats(
            log_file=log_file,
            min_time_ms=options['min_time'],
            group_by=options['group_by'],
            top_n=options['top'],
        )
        if not stats:
            self.stdout.write(self.style.WARNING("No slow computations found."))
            return

        if options['output'] == 'json':
            self.stdout.write(json.dumps(stats, indent=2, default=str))
            return

        headers = ["#", "Name", "Count", "Failures", "Avg (ms)", "Max (ms)", "Min (ms)", "Last Seen"]
        rows = [
            [i, s['name'], s['count'], s['failures'], f"{s['avg_time_ms']:.2f}",
             f"{s['max_time_ms']:.2f}", f"{s['min_time_ms']:.2f}", s['last_occurred'] or 'Unknown']
            for i, s in enumerate(stats, 1)
        ]
        self.stdout.write(tabulate.tabulate(rows, headers=headers, tablefmt="grid"))

        slowest = stats[0].get('slowest')
        if slowest:
            self.stdout.write("\nSlowest computation:")
            self.stdout.write(f"Operation: {slowest.get('operation', 'unnamed')}")
            self.stdout.write(f"Time: {slowest.get('elapsed_ms', 0):.2f}ms")
            if slowest.get('params'):
                self.stdout.write(f"Parameters: {json.dumps(slowest['params'], indent=2)}")
            if slowest.get('command'):
                self.stdout.write(f"Command: {slowest['command']} (job {slowest.get('job') or '-'})")
