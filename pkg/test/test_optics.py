import logging
import math

import numpy
import pytest

from helpers import *
from reference import apply_fog_ref
from fogsim.core import (
    RgbImage, DepthMap, AtmosphericLight, AlignmentError, InvalidParameterError, mor_to_fog_params)
from fogsim.optics import compute_transmission, apply_fog, simulate_camera_fog, quantize


@pytest.mark.parametrize('mor', [50, 100, 150, 200, 300, 1000])
def test_transmission_at_visibility(mor):
    params = mor_to_fog_params(mor)
    t = compute_transmission(DepthMap([[mor]]), params.beta_cam)
    assert abs(t.data[0, 0] - 0.049787) < 1e-6
    assert t.data[0, 0] == pytest.approx(math.exp(-3), rel=1e-12)


def test_transmission_range(rng):
    depth = get_test_depth((30, 40), rng, low=0.1, high=5000)
    t = compute_transmission(depth, 0.02)
    assert (t.data > 0).all()
    assert (t.data <= 1).all()

    # farther pixels are more attenuated
    order = numpy.argsort(depth.data.ravel())
    assert (numpy.diff(t.data.ravel()[order]) <= 0).all()


def test_transmission_without_fog(rng):
    depth = get_test_depth((5, 5), rng)
    assert (compute_transmission(depth, 0).data == 1).all()


def test_negative_attenuation():
    with pytest.raises(InvalidParameterError):
        compute_transmission(DepthMap([[1.]]), -0.1)


def test_koschmieder_oracle(rng):
    for _ in range(100):
        image = get_test_image((64, 64), rng)
        depth = get_test_depth((64, 64), rng, low=0.5, high=400)
        beta = rng.uniform(0.005, 0.1)
        airlight = AtmosphericLight(*rng.uniform(0, 1, size=3))

        result = apply_fog(image, compute_transmission(depth, beta), airlight)
        reference = apply_fog_ref(image.data, depth.data, beta, airlight.as_array())
        assert diff_is_negligible(result.data, reference, atol=1e-6, rtol=0)


def test_full_transmission_keeps_image(rng):
    image = get_test_image((8, 8), rng)
    depth = get_test_depth((8, 8), rng)
    result = apply_fog(image, compute_transmission(depth, 0), AtmosphericLight.gray(0.7))
    assert result == image


def test_opaque_fog_gives_airlight(rng):
    image = get_test_image((8, 8), rng)
    depth = DepthMap(numpy.full((8, 8), 1e5))
    light = AtmosphericLight(0.6, 0.7, 0.8)
    result = apply_fog(image, compute_transmission(depth, 1.), light)
    assert diff_is_negligible(result.data, numpy.broadcast_to(light.as_array(), (8, 8, 3)))


def test_result_between_image_and_airlight(rng):
    image = get_test_image((16, 16), rng)
    depth = get_test_depth((16, 16), rng)
    light = AtmosphericLight(*rng.uniform(0, 1, size=3))
    result = apply_fog(image, compute_transmission(depth, 0.01), light).data

    low = numpy.minimum(image.data, light.as_array())
    high = numpy.maximum(image.data, light.as_array())
    assert (result >= low - 1e-12).all()
    assert (result <= high + 1e-12).all()


def test_shape_mismatch(rng):
    image = get_test_image((8, 8), rng)
    transmission = compute_transmission(get_test_depth((8, 9), rng), 0.01)
    with pytest.raises(AlignmentError):
        apply_fog(image, transmission, AtmosphericLight.gray(0.7))


def test_simulate_with_override(rng):
    image = get_test_image((10, 10), rng)
    depth = get_test_depth((10, 10), rng)
    light = AtmosphericLight.gray(0.8)

    result, used = simulate_camera_fog(image, depth, 100, airlight_override=light)
    assert used == light
    expected = apply_fog(image, compute_transmission(depth, 0.03), light)
    assert result == expected


def test_simulate_estimates_neutral_airlight(rng):
    image = get_test_image((20, 20), rng)
    depth = get_test_depth((20, 20), rng, low=100, high=5000)
    _, used = simulate_camera_fog(image, depth, 150)
    assert used.is_neutral
    assert 0.6374 <= used.luminance <= 0.8555


def test_haze_warning(rng, caplog):
    image = get_test_image((4, 4), rng)
    depth = get_test_depth((4, 4), rng)
    with caplog.at_level(logging.WARNING, logger='fogsim'):
        simulate_camera_fog(image, depth, 2000, airlight_override=AtmosphericLight.gray(0.7))
    assert any("fog limit" in record.getMessage() for record in caplog.records)


def test_quantize():
    image = RgbImage([[[0, 0.5, 1], [1 / 255, 3.4 / 255, 3.6 / 255]]])
    result = quantize(image)
    assert result.dtype == numpy.uint8
    # halves are rounded to even
    assert result.tolist() == [[[0, 128, 255], [1, 3, 4]]]


def test_blend_example():
    image = RgbImage([[[0.2, 0.4, 0.6]]])
    depth = DepthMap([[1.]])
    result = apply_fog(image, compute_transmission(depth, math.log(2)), AtmosphericLight.gray(0.8))
    assert diff_is_negligible(result.data, numpy.array([[[0.5, 0.6, 0.7]]]))


@pytest.mark.parametrize('mor', [30, 150, 1000])
def test_airlight_is_fixed_point(rng, mor):
    light = AtmosphericLight(0.7, 0.72, 0.75)
    image = RgbImage(numpy.broadcast_to(light.as_array(), (8, 8, 3)))
    depth = get_test_depth((8, 8), rng, low=1, high=5000)
    result, _ = simulate_camera_fog(image, depth, mor, airlight_override=light)
    assert diff_is_negligible(result.data, image.data)


def test_sky_takes_airlight_color(rng):
    image = get_test_image((20, 20), rng)
    data = rng.uniform(1, 100, size=(20, 20))
    data[:10] = 5000.
    foggy, light = simulate_camera_fog(image, DepthMap(data), 150)
    assert (numpy.abs(foggy.data[:10] - light.as_array()) < 1e-3).all()


def test_no_fog_limit(rng):
    image = get_test_image((16, 16), rng)
    depth = get_test_depth((16, 16), rng, low=1, high=1e5)
    foggy, _ = simulate_camera_fog(image, depth, 1e9)
    assert diff_is_negligible(foggy.data, image.data, atol=1e-3, rtol=0)


def test_denser_fog_pulls_towards_airlight(rng):
    image = get_test_image((32, 32), rng)
    depth = get_test_depth((32, 32), rng)
    light = AtmosphericLight.gray(0.75)

    previous = image.data
    for mor in (300, 200, 150, 100, 50):
        foggy, _ = simulate_camera_fog(image, depth, mor, airlight_override=light)
        brighter = image.data <= light.as_array()
        assert (foggy.data[brighter] >= previous[brighter] - 1e-12).all()
        assert (foggy.data[~brighter] <= previous[~brighter] + 1e-12).all()
        previous = foggy.data


def test_transmission_decreases_with_attenuation(rng):
    depth = get_test_depth((10, 10), rng)
    betas = numpy.sort(rng.uniform(0, 0.1, size=20))
    maps = numpy.array([compute_transmission(depth, beta).data for beta in betas])
    assert (numpy.diff(maps, axis=0) <= 0).all()
