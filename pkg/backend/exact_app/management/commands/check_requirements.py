from pathlib import Path

import tabulate
from django.core.management.base import BaseCommand, CommandError

from exact_app import requirements_check as rc


class Command(BaseCommand):
    help = 'Check installed package versions against backend/requirements.txt'

    def add_arguments(self, parser):
        parser.add_argument('--file', type=str, default=str(rc.REQUIREMENTS_FILE), help='Requirements file')
        parser.add_argument('--write-pin', action='store_true',
                            help='Rewrite the file pinning every installed requirement')

    def handle(self, *args, **options):
        path = Path(options['file'])
        if not path.exists():
            raise CommandError(f"Requirements file not found: {path}", returncode=2)
        text = path.read_text(encoding='utf-8')
        installed = rc.installed_versions()

        if options['write_pin']:
            path.write_text(rc.pinned_text(text, installed), encoding='utf-8')
            self.stdout.write(self.style.SUCCESS(f"Pinned {path}"))
            return

        findings = rc.check(rc.requirement_lines(text), installed)
        rows = [[f.name, f.specifier or '-', f.installed or '-', f.status] for f in findings]
        self.stdout.write(tabulate.tabulate(rows, headers=["Package", "Specifier", "Installed", "Status"],
                                            tablefmt="simple"))
        mismatches = [f for f in findings if f.is_mismatch]
        if mismatches:
            raise CommandError(f"{len(mismatches)} mismatch(es): {', '.join(f.name for f in mismatches)}",
                               returncode=1)
        self.stdout.write(self.style.SUCCESS("All installed versions satisfy the requirements."))
