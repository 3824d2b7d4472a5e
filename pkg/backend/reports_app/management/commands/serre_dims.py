from reports_app.base import ReportCommand, load_gcm, load_height
from reports_app.services import serre_dims_report


class Command(ReportCommand):
    help = 'Dimensions of the Serre ideal by height, with the quotient profile and onset pattern'

    def add_command_arguments(self, parser):
        parser.add_argument('--max', type=int, required=True, help='Largest total degree')

    def build(self, **options):
        return serre_dims_report(load_gcm(options['gcm']), load_height(options['max']))
