import numpy as np
import pytest

from bigit.errors import PgmError
from bigit.scene import Scene, decode_pgm, encode_pgm, load_raster_map


def test_two_by_two_threshold():
    data = b"P5\n2 2\n255\n" + bytes([0, 255, 255, 0])
    r = load_raster_map(data, 1.0, occupied_below=128)
    assert r.occupancy.ravel().tolist() == [True, False, False, True]


def test_origin_is_bottom_left_pixel():
    data = b"P5\n2 2\n255\n" + bytes([0, 255, 255, 255])  # top-left dark
    r = load_raster_map(data, 2.0)
    scene = Scene(r.bounds(), raster=r)
    assert not scene.state_valid((1.0, 3.0))
    assert scene.state_valid((1.0, 1.0))


def test_white_map_is_all_free():
    r = load_raster_map(encode_pgm(np.full((5, 7), 255)), 0.1)
    scene = Scene(r.bounds(), raster=r)
    pts = np.random.default_rng(0).random((200, 2)) * [0.7, 0.5]
    assert scene.points_valid(pts).all()


def test_ascii_and_binary_encodings_agree():
    img = np.random.default_rng(1).integers(0, 256, size=(6, 9)).astype(np.uint8)
    a = load_raster_map(encode_pgm(img, binary=True), 1.0).occupancy
    b = load_raster_map(encode_pgm(img, binary=False), 1.0).occupancy
    assert np.array_equal(a, b)
    assert np.array_equal(decode_pgm(encode_pgm(img, binary=False)), img)


def test_comments_in_header():
    data = b"P2\n# made by hand\n2 1 # width height\n255\n10 200\n"
    assert decode_pgm(data).tolist() == [[10, 200]]


@pytest.mark.parametrize("data,offset", [
    (b"P6\n1 1\n255\n\x00", 0),
    (b"P5\n2 x\n255\n", 5),
    (b"P5\n2 2\n65535\n", 7),
    (b"P5\n2 2\n255\n\x00\x00\x00", 14),
    (b"P2\n2 1\n255\n7", 12),
    (b"P", 0),
])
def test_malformed_input_reports_offset(data, offset):
    with pytest.raises(PgmError) as info:
        decode_pgm(data)
    assert info.value.offset == offset
