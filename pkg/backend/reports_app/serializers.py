from rest_framework import serializers

from cartan_app.services import validate_gcm
from exact_app.errors import KMForgeError
from exact_app.scalars import ScalarField
from functors_app.models import COVER, SUBSYSTEM, SURJECTION

JOB_COMMANDS = [
    'analyze', 'roots', 'serre_dims', 'gk_check', 'lcs', 'zjl', 'nondensity', 'functor',
    'slcover', 'funny_chain', 'lie_witness', 'isom_check', 'ideal_quotient', 'mult_check', 'census',
]


def _as_validation_error(error: KMForgeError) -> serializers.ValidationError:
    return serializers.ValidationError(error.as_dict())


class GCMSerializer(serializers.Serializer):
    labels = serializers.ListField(child=serializers.CharField(), required=False)
    matrix = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))

    def to_internal_value(self, data):
        # a bare matrix is accepted as shorthand for {"matrix": ...}
        if isinstance(data, list):
            data = {'matrix': data}
        return super().to_internal_value(data)

    def validate(self, attrs):
        try:
            attrs['gcm'] = validate_gcm(attrs['matrix'], attrs.get('labels'))
        except KMForgeError as e:
            raise _as_validation_error(e)
        return attrs


class FieldSerializer(serializers.Serializer):
    char = serializers.IntegerField(min_value=0)

    def validate(self, attrs):
        try:
            attrs['field'] = ScalarField.from_char(attrs['char'])
        except KMForgeError as e:
            raise _as_validation_error(e)
        return attrs


class TruncationSerializer(serializers.Serializer):
    height = serializers.IntegerField(min_value=1)


class StripSerializer(serializers.Serializer):
    q = serializers.IntegerField(min_value=2)
    pair = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=2, max_length=2)

    def validate_pair(self, value):
        if value[0] == value[1]:
            raise serializers.ValidationError('The pair needs two distinct indices.')
        return value


class FunctorSerializer(serializers.Serializer):
    """A graded map: a surjection onto a smaller matrix, a subsystem of real roots, or a cover."""

    kind = serializers.ChoiceField(choices=[SURJECTION, SUBSYSTEM, COVER])
    source = GCMSerializer(required=False)
    target = GCMSerializer(required=False)
    betas = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)), required=False
    )
    embedding = serializers.ListField(child=serializers.IntegerField(min_value=1), required=False)

    def to_internal_value(self, data):
        if isinstance(data, dict) and isinstance(data.get('kind'), str):
            data = {**data, 'kind': data['kind'].capitalize()}
        return super().to_internal_value(data)

    def validate(self, attrs):
        needed = {
            SURJECTION: ('source', 'target'),
            SUBSYSTEM: ('target', 'betas'),
            COVER: ('source',),
        }[attrs['kind']]
        missing = [name for name in needed if name not in attrs]
        if missing:
            raise serializers.ValidationError({name: f"Required for a {attrs['kind']} map." for name in missing})
        return attrs


class JobConfigSerializer(serializers.Serializer):
    command = serializers.ChoiceField(choices=JOB_COMMANDS)
    # inline matrix/object or a path to a JSON file
    gcm = serializers.JSONField(required=False)
    field = FieldSerializer(required=False)
    truncation = TruncationSerializer(required=False)
    options = serializers.DictField(required=False, default=dict)
    out = serializers.CharField(required=False, allow_blank=False)
