from reports_app.base import ReportCommand
from reports_app.services import funny_chain_report


class Command(ReportCommand):
    help = 'Chain of rank-2 subsystem embeddings a -> a(a^2 - 3) with pairing certificates'
    takes_gcm = False

    def add_command_arguments(self, parser):
        parser.add_argument('--a', type=int, required=True, help='Starting off-diagonal magnitude')
        parser.add_argument('--steps', type=int, default=2, help='Number of embeddings')

    def build(self, **options):
        return funny_chain_report(options['a'], options['steps'])
