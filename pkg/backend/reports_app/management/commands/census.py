from reports_app.base import ReportCommand, load_field, load_gcm, load_height
from reports_app.services import census_report


class Command(ReportCommand):
    help = 'Exhaustive census of group-like truncated series over a prime field'
    takes_field = True
    takes_height = True
    default_char = None

    def add_command_arguments(self, parser):
        parser.add_argument('--cap', type=int, default=None, help='Largest number of candidates to scan')
        parser.add_argument('--with-elements', action='store_true', help='List the normal-form tuples')

    def build(self, **options):
        return census_report(load_gcm(options['gcm']), load_height(options['height']),
                             load_field(options['char']), options['cap'], options['with_elements'])
