from reports_app.base import ReportCommand, load_gcm
from reports_app.services import analyze_report


class Command(ReportCommand):
    help = 'Classify a GCM: type, M_A, symmetrizer, compact hyperbolicity and the first affine B <= A'

    def add_command_arguments(self, parser):
        parser.add_argument('--require-indecomposable', action='store_true',
                            help='Fail with exit code 2 on a decomposable matrix')

    def build(self, **options):
        return analyze_report(load_gcm(options['gcm']), options['require_indecomposable'])
