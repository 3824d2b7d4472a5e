from reports_app.base import ReportCommand, load_field
from reports_app.services import lie_witness_report


class Command(ReportCommand):
    help = 'Bracket witness for [[2,-m],[-n,2]]: x in an imaginary root space with [f_i, x] != 0'
    takes_gcm = False
    takes_field = True

    def add_command_arguments(self, parser):
        parser.add_argument('--m', type=int, required=True)
        parser.add_argument('--n', type=int, required=True)

    def build(self, **options):
        return lie_witness_report(options['m'], options['n'], load_field(options['char']))
