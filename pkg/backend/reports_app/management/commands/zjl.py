from groupquot_app.services import QuotCtx
from reports_app.base import ReportCommand, load_field, load_gcm, load_height
from reports_app.services import zjl_report


class Command(ReportCommand):
    help = 'Dimension subgroups D_n against gamma_n, and the graded Lie algebra of the D_n against n+'
    takes_field = True
    takes_height = True
    takes_order_cap = True
    default_char = None

    def build(self, **options):
        field = load_field(options['char'])
        ctx = QuotCtx(load_gcm(options['gcm']), load_height(options['height']), field.p, options['order_cap'])
        return zjl_report(ctx)
