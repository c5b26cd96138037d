from django import forms

from .definitions import parse_definition
from .exceptions import DefinitionError
from .models import MonadRecord
from .runner import FORMATS


class MonadRecordForm(forms.ModelForm):
    """
    Form for storing a monad definition; the text must parse
    """

    class Meta:
        model = MonadRecord
        fields = ['name', 'text']
        labels = {
            'name': 'Name',
            'text': 'Definition',
        }

    def clean_text(self):
        text = self.cleaned_data['text']
        try:
            parse_definition(text)
        except DefinitionError as exc:
            raise forms.ValidationError(str(exc))
        return text


class RunConfigForm(forms.Form):
    """
    Options for running an analysis from the web front end
    """
    monad = forms.CharField(max_length=255, initial='builtin:gr_mon',
                            help_text="Pipeline such as builtin:gr_mon or plus(builtin:mon)")
    kind = forms.CharField(max_length=20, initial='T+1')
    degree = forms.IntegerField(min_value=0, max_value=4, initial=2)
    xdeg = forms.IntegerField(min_value=0, max_value=6, initial=3)
    arity = forms.IntegerField(min_value=0, max_value=6, required=False)
    valence = forms.IntegerField(min_value=0, max_value=6, required=False)
    budget = forms.IntegerField(min_value=1, required=False)
    seed = forms.IntegerField(required=False)
    format = forms.ChoiceField(choices=[(f, f) for f in FORMATS], initial='json')

    def clean_monad(self):
        monad = self.cleaned_data['monad']
        try:
            parse_definition(monad)
        except DefinitionError as exc:
            raise forms.ValidationError(str(exc))
        return monad

    def clean(self):
        cleaned_data = super().clean()
        degree, xdeg = cleaned_data.get('degree'), cleaned_data.get('xdeg')
        if degree is not None and xdeg is not None and xdeg < degree:
            raise forms.ValidationError('xdeg must be at least the degree.')
        return cleaned_data
