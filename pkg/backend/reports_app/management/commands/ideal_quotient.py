from groupquot_app.services import QuotCtx
from reports_app.base import ReportCommand, load_field, load_gcm, load_height
from reports_app.services import ideal_quotient_report, parse_indices


class Command(ReportCommand):
    help = 'Quotient of the truncated group by the root-ideal subgroup off a subdiagram J'
    takes_field = True
    takes_height = True
    takes_order_cap = True
    default_char = None

    def add_command_arguments(self, parser):
        parser.add_argument('--subset', type=str, required=True, help='Subdiagram J, e.g. 1 or 1,2')

    def build(self, **options):
        field = load_field(options['char'])
        ctx = QuotCtx(load_gcm(options['gcm']), load_height(options['height']), field.p, options['order_cap'])
        return ideal_quotient_report(ctx, parse_indices(options['subset'], 'subset'))
