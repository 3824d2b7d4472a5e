from reports_app.base import ReportCommand, load_field, load_gcm
from reports_app.services import gk_check_report, parse_indices


class Command(ReportCommand):
    help = 'Common kernel of the divided lowering operators on one imaginary root space'
    takes_field = True

    def add_command_arguments(self, parser):
        parser.add_argument('--delta', type=str, required=True, help='Imaginary root, e.g. 1,1')

    def build(self, **options):
        delta = parse_indices(options['delta'], 'delta')
        return gk_check_report(load_gcm(options['gcm']), delta, load_field(options['char']))
