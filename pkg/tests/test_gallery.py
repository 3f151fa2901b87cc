import pytest

from skewdich import gallery
from skewdich.base_space import GeneratorSpec
from skewdich.dichotomy import ClassParams, DichotomyClass as D


def test_registry():
    assert set(gallery.SOURCE_INSTANCES) <= set(gallery.NAMES)
    assert len(gallery.SOURCE_INSTANCES) == 7
    with pytest.raises(KeyError):
        gallery.get("nope")
    with pytest.raises(ValueError):
        gallery.get("bved", alpha1=-1.0)


def test_ex21_claim_follows_the_signs():
    assert gallery.get("ex21", alpha1=-1.0, alpha2=2.0).claimed == {D.UED: True}
    assert gallery.get("ex21", alpha1=1.0, alpha2=2.0).claimed == {}


def test_claimed_params_are_valid():
    for name in gallery.NAMES:
        inst = gallery.get(name)
        for cls, values in inst.claimed_params.items():
            ClassParams.make(cls, values)


def test_generator_override():
    inst = gallery.get("bvpd_osc", GeneratorSpec.reciprocal_shift())
    assert inst.generator.limit_l == 0.0
    assert gallery.get("bvpd_osc_l0").generator.kind == "reciprocal_shift"


def test_witness_lookup():
    inst = gallery.get("bved")
    assert inst.witness("sin-peaks").branch == 1
    with pytest.raises(KeyError, match="known: sin-peaks, cos-peaks"):
        inst.witness("missing")


def test_json_shape():
    j = gallery.get("ed_gap").to_json()
    assert j["claimed"] == {"BVED": False, "BVPD": False, "ED": True, "PD": True}
    assert [w["name"] for w in j["witnesses"]] == ["knot-drop", "knot-drop-2"]
