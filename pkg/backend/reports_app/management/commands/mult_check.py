from reports_app.base import ReportCommand, load_gcm, load_height
from reports_app.services import mult_check_report


class Command(ReportCommand):
    help = 'Cross-check Serre-quotient dimensions against Peterson multiplicities'
    takes_height = True

    def build(self, **options):
        return mult_check_report(load_gcm(options['gcm']), load_height(options['height']))
