from reports_app.base import ReportCommand, load_field, load_height, load_json_argument, validated
from reports_app.serializers import FunctorSerializer
from reports_app.services import functor_report, parse_indices


class Command(ReportCommand):
    help = 'Build a graded map (surjection, subsystem or cover) and check it up to a height'
    takes_gcm = False
    takes_field = True
    takes_height = True
    default_height = 4

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', type=str, required=True, choices=['surjection', 'subsystem', 'cover'])
        parser.add_argument('--source', type=str, default=None, help='Source GCM (surjection, cover)')
        parser.add_argument('--target', type=str, default=None, help='Target GCM (surjection, subsystem)')
        parser.add_argument('--betas', type=str, default=None, help='Real roots of the target as JSON, e.g. [[3,1],[1,3]]')
        parser.add_argument('--embedding', type=str, default=None,
                            help='Source index for each target index, e.g. 1,2 (surjection)')
        parser.add_argument('--minimal-image', action='store_true',
                            help='Also report the image of the minimal group (surjection, prime field)')

    def build(self, **options):
        data = {'kind': options['kind']}
        for name in ('source', 'target', 'betas'):
            if options[name] is not None:
                data[name] = load_json_argument(options[name], name)
        if options['embedding']:
            data['embedding'] = parse_indices(options['embedding'], 'embedding')
        spec = validated(FunctorSerializer, data)
        return functor_report(spec, load_height(options['height']), load_field(options['char']),
                              options['minimal_image'])
