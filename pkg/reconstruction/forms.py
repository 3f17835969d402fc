from django import forms
from django.core.management.base import CommandError

from .tasks import SWEEP_AXES
from .utils.optimize import InitMode
from .utils.sampling import SamplingMethod
from .utils.synth import Shape


def _choices(enum_cls):
    return [(member.value, member.value) for member in enum_cls]


class PositiveFloatField(forms.FloatField):
    def validate(self, value):
        super().validate(value)
        if value is not None and value <= 0:
            raise forms.ValidationError('Must be positive.')


class SamplerOptionsForm(forms.Form):
    method = forms.ChoiceField(choices=_choices(SamplingMethod))
    k = forms.IntegerField(min_value=1)
    threshold = forms.FloatField()
    seed = forms.IntegerField(min_value=0)

    def clean_threshold(self):
        threshold = self.cleaned_data.get('threshold')
        if threshold is not None and not 0.0 < threshold < 1.0:
            raise forms.ValidationError('Threshold must lie strictly between 0 and 1.')
        return threshold


class SampleForm(SamplerOptionsForm):
    image = forms.CharField()
    out = forms.CharField()
    epoch = forms.IntegerField(min_value=0)


class SynthForm(forms.Form):
    shape = forms.ChoiceField(choices=_choices(Shape))
    views = forms.IntegerField(min_value=1)
    res = forms.IntegerField(min_value=4)
    points = forms.IntegerField(min_value=1)
    radius = PositiveFloatField(required=False)
    camera_radius = PositiveFloatField()
    elevation = forms.FloatField(min_value=-89.0, max_value=89.0)
    azimuth = forms.FloatField()
    seed = forms.IntegerField(min_value=0)
    path = forms.CharField(required=False)
    out = forms.CharField()

    def clean(self):
        cleaned = super().clean()
        if cleaned.get('shape') == Shape.FROM_FILE.value and not cleaned.get('path'):
            raise forms.ValidationError("--shape file needs --path to a point cloud.")
        return cleaned


class ReconstructForm(SamplerOptionsForm):
    points = forms.IntegerField(min_value=1)
    steps = forms.IntegerField(min_value=1)
    lr = PositiveFloatField()
    beta1 = forms.FloatField(min_value=0.0, max_value=1.0)
    beta2 = forms.FloatField(min_value=0.0, max_value=1.0)
    adam_eps = PositiveFloatField()
    init = forms.ChoiceField(choices=_choices(InitMode))
    resample_every = forms.IntegerField(min_value=0)
    log_every = forms.IntegerField(min_value=1)
    nn_first = forms.IntegerField(min_value=1)
    nn_second = forms.IntegerField(min_value=1)
    terms = forms.ChoiceField(choices=[('both', 'both'), ('first', 'first'), ('second', 'second')])
    workers = forms.IntegerField(min_value=1)

    def clean_init(self):
        init = self.cleaned_data.get('init')
        if init == InitMode.PROVIDED.value:
            raise forms.ValidationError("init 'provided' is only available through the library.")
        return init

    def clean(self):
        cleaned = super().clean()
        for name in ('beta1', 'beta2'):
            value = cleaned.get(name)
            if value is not None and not 0.0 < value < 1.0:
                self.add_error(name, 'Adam decay rates must lie strictly between 0 and 1.')
        return cleaned


class SweepForm(ReconstructForm):
    axis = forms.ChoiceField(choices=[(axis, axis) for axis in SWEEP_AXES])
    parallel = forms.IntegerField(min_value=1)


class EvalForm(forms.Form):
    recon = forms.CharField()
    reference = forms.CharField()
    resolution = forms.IntegerField(min_value=1)


def validated(form_class, options):
    """Cleaned options, or a CommandError listing every invalid flag."""
    form = form_class(data={key: value for key, value in options.items() if value is not None})
    if not form.is_valid():
        problems = []
        for field, errors in form.errors.items():
            flag = '' if field == '__all__' else f"--{field.replace('_', '-')}: "
            problems.extend(f"{flag}{error}" for error in errors)
        raise CommandError('Invalid options: ' + '; '.join(problems))
    return form.cleaned_data
