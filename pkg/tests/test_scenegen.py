import math

import numpy as np
import pytest

from ontodetect.exceptions import SpecError
from ontodetect.railway import (
    SceneObject,
    SceneSpec,
    acceptance_scene_spec,
    format_scene_spec,
    generate_scene,
    parse_scene_spec,
    with_seed,
    write_scene,
)
from ontodetect.railway.pipeline import DATA_DIR


def test_ten_masts_at_fifty_metres():
    spec = parse_scene_spec("length_m = 500\n" + "".join(f"mast@{x}\n" for x in range(0, 451, 50)))
    _, truth = generate_scene(spec)
    masts = truth.individuals_of("NormalMast")
    assert len(masts) == 10
    assert sorted(truth.value(m, "cx") for m in masts) == [float(x) for x in range(0, 451, 50)]
    assert all(truth.value(m, "height") == 5.5 for m in masts)


def test_noiseless_pole_on_surface():
    spec = SceneSpec(length_m=20, objects=(SceneObject("normal_mast", 10.0, 0.0),), ground_density_ppm2=0)
    pc, _ = generate_scene(spec)
    r = np.hypot(pc.points[:, 0] - 10.0, pc.points[:, 1])
    assert np.allclose(r, 0.1, atol=1e-4)
    assert pc.points[:, 2].min() >= 0 and pc.points[:, 2].max() <= 5.5
    # 200 points/m² over the lateral area
    assert len(pc) == round(2 * math.pi * 0.1 * 5.5 * 200)


def test_signal_has_cabinet_at_base():
    spec = SceneSpec(length_m=20, objects=(SceneObject("main_signal", 10.0, -3.0),))
    _, truth = generate_scene(spec)
    (cab,) = truth.individuals_of("SchaltSchrack")
    (sig,) = truth.individuals_of("Main_Signal")
    assert truth.value(cab, "height") == 0.4
    # away from the track at y = 0
    assert truth.value(cab, "cy") < truth.value(sig, "cy")
    assert abs(truth.value(cab, "cx") - truth.value(sig, "cx")) < 1e-9


def test_same_seed_byte_identical(tmp_path):
    spec = acceptance_scene_spec()
    spec = SceneSpec(length_m=400, objects=spec.objects[:5], noise_sigma_m=0.02, outlier_fraction=0.05, seed=3)
    a = write_scene(spec, tmp_path / "a")
    b = write_scene(spec, tmp_path / "b")
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    c = write_scene(with_seed(spec, 4), tmp_path / "c")
    assert c[0].read_bytes() != a[0].read_bytes()


def test_outlier_fraction():
    spec = SceneSpec(length_m=100, objects=(SceneObject("big_mast", 50.0),), outlier_fraction=0.2,
                     ground_density_ppm2=0)
    clean, _ = generate_scene(SceneSpec(length_m=100, objects=spec.objects, ground_density_ppm2=0))
    noisy, _ = generate_scene(spec)
    assert (len(noisy) - len(clean)) / len(noisy) == pytest.approx(0.2, abs=1e-3)


def test_spec_round_trip():
    spec = acceptance_scene_spec()
    assert parse_scene_spec(format_scene_spec(spec)) == spec
    assert (DATA_DIR / "acceptance.scene").read_text(encoding="utf-8") == format_scene_spec(spec)


def test_spec_overrides_and_comments():
    spec = parse_scene_spec("# a scene\nlength_m = 50  # metres\nseed=3\nbig_mast@10 y=-2 height=8\n")
    assert spec.seed == 3 and spec.length_m == 50
    (obj,) = spec.objects
    assert obj.y == -2 and obj.setting("height") == 8 and obj.setting("radius") == 0.12


@pytest.mark.parametrize("text", [
    "length_m = 100\nmast@150\n",
    "length_m = 100\nrocket@10\n",
    "noise_sigma_m = -1\n",
    "colour = blue\n",
    "length_m = ten\n",
    "mast@10 y\n",
    "mast@10 y=9\n",
    "outlier_fraction = 1\n",
])
def test_bad_specs(text):
    with pytest.raises(SpecError):
        parse_scene_spec(text)
