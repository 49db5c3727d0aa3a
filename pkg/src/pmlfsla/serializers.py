import math

from rest_framework import serializers

from .config import METHOD_CHOICES, RunConfig


def _strictly_positive(value: float) -> float:
    if not (math.isfinite(value) and value > 0):
        raise serializers.ValidationError("Must be a finite value > 0.")
    return value


class RunConfigSerializer(serializers.Serializer):
    x = serializers.CharField(allow_null=True)
    y = serializers.CharField(allow_null=True)
    truth = serializers.CharField(allow_null=True)
    dataset = serializers.CharField(allow_null=True)
    out_dir = serializers.CharField()
    radius = serializers.FloatField()
    min_pts = serializers.IntegerField(min_value=2)
    k = serializers.IntegerField(min_value=2, allow_null=True)
    alpha = serializers.FloatField()
    beta = serializers.FloatField()
    gamma = serializers.FloatField()
    delta = serializers.FloatField(min_value=0)
    eps_d = serializers.FloatField()
    eps_div = serializers.FloatField()
    max_iter = serializers.IntegerField(min_value=0)
    rel_tol = serializers.FloatField(min_value=0)
    fractions = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    folds = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField()
    noise_rate = serializers.FloatField(min_value=0, max_value=1, allow_null=True)
    method = serializers.ChoiceField(choices=sorted(METHOD_CHOICES))
    trace = serializers.BooleanField()
    plain_frobenius_penalty = serializers.BooleanField()
    grid = serializers.BooleanField()
    n_jobs = serializers.IntegerField()
    random_baselines = serializers.IntegerField(min_value=0)

    def validate_radius(self, value):
        return _strictly_positive(value)

    def validate_alpha(self, value):
        return _strictly_positive(value)

    def validate_beta(self, value):
        return _strictly_positive(value)

    def validate_gamma(self, value):
        return _strictly_positive(value)

    def validate_delta(self, value):
        if not math.isfinite(value):
            raise serializers.ValidationError("Must be finite.")
        return value

    def validate_eps_d(self, value):
        return _strictly_positive(value)

    def validate_eps_div(self, value):
        return _strictly_positive(value)

    def validate_rel_tol(self, value):
        if value >= 1:
            raise serializers.ValidationError("Must be smaller than 1.")
        return value

    def validate_fractions(self, value):
        if not all(0 < fraction <= 1 for fraction in value):
            raise serializers.ValidationError("Every fraction must lie in (0, 1].")
        return value

    def validate_n_jobs(self, value):
        if value == 0:
            raise serializers.ValidationError("Use a positive worker count or -1 for all cores.")
        return value

    def create(self, validated_data):
        return RunConfig(**validated_data)
