import json

import pytest

from skewdich import gallery
from skewdich.dichotomy import DichotomyClass
from skewdich.specfile import SpecError, instance_from_json, load_instance

SYNTH = {
    "name": "file_synthetic",
    "h1": [{"kind": "poly", "coeffs": [0, -2]}],
    "h2": [{"kind": "poly", "coeffs": [0, 2]}],
    "claimed": {"UED": True},
}


def test_roundtrip_through_a_file(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(SYNTH))
    inst = load_instance(path)
    assert inst.cocycle == gallery.get("synthetic").cocycle
    assert inst.claimed == {DichotomyClass.UED: True}
    assert inst.pair.name == "coordinate"


def test_gallery_cocycles_are_expressible():
    for name in gallery.SOURCE_INSTANCES:
        inst = gallery.get(name)
        c = inst.cocycle.to_json()
        obj = {"name": name, "generator": inst.generator.to_json(), "h1": c["h1"], "h2": c["h2"],
               "c1": c["c1"], "c2": c["c2"], "lambda": c["lambda"]}
        assert instance_from_json(obj).cocycle == inst.cocycle


@pytest.mark.parametrize("patch", [
    {"h1": [{"kind": "cubic"}]},
    {"name": ""},
    {"claimed": {"XYZ": True}},
    {"projectors": "diagonal"},
    {"projectors": {"matrix": [[1, 0]]}},
    {"generator": {"kind": "one_plus_exp_neg", "rate": -1}},
    {"surprise": 1},
])
def test_invalid_specs(patch):
    with pytest.raises(SpecError):
        instance_from_json({**SYNTH, **patch})


def test_unreadable_files(tmp_path):
    with pytest.raises(SpecError):
        load_instance(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError, match="not JSON"):
        load_instance(bad)
