from groupquot_app.services import QuotCtx
from reports_app.base import ReportCommand, load_field, load_gcm, load_height
from reports_app.services import lcs_report


class Command(ReportCommand):
    help = 'Lower central series of the truncated unipotent group, compared with the height filtration'
    takes_field = True
    takes_height = True
    takes_order_cap = True
    default_char = None

    def add_command_arguments(self, parser):
        parser.add_argument('--p-power-samples', type=int, default=0,
                            help='Also check g^p in U_np on this many random g per n')

    def build(self, **options):
        field = load_field(options['char'])
        ctx = QuotCtx(load_gcm(options['gcm']), load_height(options['height']), field.p, options['order_cap'])
        return lcs_report(ctx, options['p_power_samples'])
