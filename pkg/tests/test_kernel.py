import math

import numpy as np
import pytest

from smallscatter.kernel import build_kernel_cube, green, kernel_cube, mirror_pad
from smallscatter.lattice import build_lattice


def test_static_limit():
    assert green([0, 0, 0], [1, 0, 0], 0.0) == pytest.approx(1 / (4 * math.pi))


@pytest.mark.parametrize("k", [0.0, 0.3, 5.0])
@pytest.mark.parametrize("r", [0.01, 0.5, 3.0])
def test_modulus(k, r):
    assert abs(green([0, 0, 0], [0, r, 0], k)) == pytest.approx(1 / (4 * math.pi * r))


def test_reference_value():
    # exp(0.0913255 i) / (2 pi) evaluated with mpmath at 30 digits
    g = green([0.1, 0.2, 0.3], [0.1, 0.2, 0.8], 0.182651)
    assert g == pytest.approx(0.158491700534828936 + 0.014514708821142360j, rel=1e-14)


def test_singular():
    with pytest.raises(ValueError):
        green([1, 2, 3], [1, 2, 3], 1.0)


def test_mirror_pad_paper_example():
    a = np.arange(1, 17).reshape(4, 4)
    out = mirror_pad(a, axes=[1])
    np.testing.assert_array_equal(out[0], [1, 2, 3, 4, 3, 2])
    np.testing.assert_array_equal(out[3], [13, 14, 15, 16, 15, 14])


def test_mirror_pad_b2():
    np.testing.assert_array_equal(mirror_pad(np.array([5.0, 7.0])), [5.0, 7.0])


def test_mirror_pad_longer():
    # slot L - t holds entry t, untouched middle slots are zero
    np.testing.assert_array_equal(mirror_pad(np.array([1, 2, 3, 4]), length=8), [1, 2, 3, 4, 0, 4, 3, 2])


def test_kernel_too_small():
    with pytest.raises(ValueError):
        kernel_cube(1, 1.0, 1.0)


def test_kernel_shape_and_centre():
    kc = build_kernel_cube(build_lattice(b=5), 0.4)
    assert kc.side == 8
    assert kc.values.shape == (8, 8, 8)
    assert kc.values[0, 0, 0] == 0


def test_kernel_wrapped_entry_b3():
    lat = build_lattice(b=3)
    kc = build_kernel_cube(lat, 0.7)
    assert kc.values[3, 0, 0] == kc.values[1, 0, 0]
    assert kc.values[1, 0, 0] == pytest.approx(green([0, 0, 0], [lat.d, 0, 0], 0.7), rel=1e-14)


@pytest.mark.parametrize("b", [2, 3, 4, 5, 6])
def test_kernel_matches_offsets_exhaustively(b):
    d, k = 1.0 / b, 0.9
    kc = kernel_cube(b, d, k)
    L = 2 * b - 2
    for t in np.ndindex(L, L, L):
        # wrapped offset -> signed offset in (-b, b)
        off = [ti if ti < b else ti - L for ti in t]
        neg = tuple((-o) % L for o in off)
        assert kc.values[t] == kc.values[neg]
        if any(off):
            expected = green([0, 0, 0], [d * o for o in off], k)
            assert kc.values[t] == pytest.approx(expected, rel=1e-13)
