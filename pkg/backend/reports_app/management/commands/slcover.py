from reports_app.base import ReportCommand, load_gcm
from reports_app.services import slcover_report


class Command(ReportCommand):
    help = 'Simply laced cover of a symmetrizable GCM'

    def build(self, **options):
        return slcover_report(load_gcm(options['gcm']))
