from reports_app.base import ReportCommand, load_gcm, validated
from reports_app.serializers import StripSerializer
from reports_app.services import nondensity_report, parse_indices


class Command(ReportCommand):
    help = 'Strip-quotient certificates that [exp][e_i, e_j] escapes the derived subgroup and the root groups'

    def add_command_arguments(self, parser):
        parser.add_argument('--q', type=int, required=True, help='Prime q of the residue field')
        parser.add_argument('--pair', type=str, default='1,2', help='Index pair i,j (1-based)')
        parser.add_argument('--exhaustive', action='store_true',
                            help='Also check C_1 = C_q on every pair of strip group elements')

    def build(self, **options):
        strip = validated(StripSerializer, {'q': options['q'], 'pair': parse_indices(options['pair'], 'pair')})
        return nondensity_report(load_gcm(options['gcm']), strip['q'], strip['pair'], options['exhaustive'])
