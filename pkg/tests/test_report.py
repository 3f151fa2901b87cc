import json
import math

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewdich.dichotomy import DichotomyClass
from skewdich.report import dumps, make_report, validate

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | st.floats(allow_nan=True) | st.text(max_size=5),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=4), inner, max_size=4),
    max_leaves=20,
)


def test_float_format_and_non_finite():
    text = dumps({"a": 1.5, "b": math.inf, "c": -math.inf, "d": math.nan, "e": 3, "f": True})
    obj = json.loads(text)
    assert obj == {"a": 1.5, "b": "inf", "c": "-inf", "d": "nan", "e": 3, "f": True}
    assert '"a": 1.500000000000e+00' in text


def test_enums_and_tuples():
    text = dumps({DichotomyClass.UED: (1, 2.0), "k": DichotomyClass.PD})
    assert json.loads(text) == {"UED": [1, 2.0], "k": "PD"}


@given(json_values)
def test_output_always_parses_and_is_stable(obj):
    text = dumps(obj)
    json.loads(text)
    assert dumps(obj) == text


def test_envelope_validates():
    rep = make_report("classify", {"name": "x"}, {"t": 1}, {"ok": True}, extra_field=1)
    assert list(rep) == ["tool", "command", "instance", "grid", "extra_field", "result"]
    assert validate(dumps(rep))["result"] == {"ok": True}
    with pytest.raises(jsonschema.ValidationError):
        validate(dumps({"tool": {}}))


def test_unknown_objects_rejected():
    with pytest.raises(TypeError):
        dumps({"x": object()})
