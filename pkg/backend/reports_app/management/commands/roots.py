from reports_app.base import ReportCommand, load_gcm, load_height
from reports_app.services import roots_report


class Command(ReportCommand):
    help = 'Positive roots up to a height with multiplicities, kinds and descent words'
    takes_height = True

    def build(self, **options):
        return roots_report(load_gcm(options['gcm']), load_height(options['height']))
