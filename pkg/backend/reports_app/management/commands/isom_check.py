from reports_app.base import ReportCommand, load_field, load_gcm, load_height
from reports_app.services import isom_check_report


class Command(ReportCommand):
    help = 'Compare isomorphism invariants of two GCMs: height profiles, Serre onsets, abelianizations'
    takes_height = True
    takes_order_cap = True

    def add_command_arguments(self, parser):
        parser.add_argument('--other', type=str, required=True, help='Second GCM, same formats as --gcm')
        parser.add_argument('--char', type=int, default=None,
                            help='Also compare abelianization orders of the truncated groups over F_p')

    def build(self, **options):
        A = load_gcm(options['gcm'])
        B = load_gcm(options['other'], 'other')
        p = load_field(options['char']).p if options['char'] is not None else None
        return isom_check_report(A, B, load_height(options['height']), p, options['order_cap'])
