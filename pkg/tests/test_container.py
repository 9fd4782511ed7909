"""PTC1 container roundtrips, failure modes, and tile/region reads."""

import numpy as np
import pytest

from pathharbor.model.entities import SlideInfo
from pathharbor.slides.container import (
    BadMagicError,
    LevelOutOfRangeError,
    RegionTooLargeError,
    TileOutOfRangeError,
    TruncatedFileError,
    UnsupportedVersionError,
    open_container,
    read_region,
    read_tile,
    write_container,
)
from pathharbor.slides.pyramid import build_pyramid, pyramid_level_count

from oracles import oracle_crop


def _make_slide(tmp_path, w=1024, h=768, tile_size=256, seed=0):
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    levels = build_pyramid(base, tile_size)
    info = SlideInfo(
        slide_id="a" * 32,
        width_base=w,
        height_base=h,
        num_levels=pyramid_level_count(w, h, tile_size),
        tile_size=tile_size,
        pixel_size_nm=250,
    )
    path = write_container(info, levels, tmp_path / "slide.ptc")
    return info, levels, path


def test_write_open_roundtrip(tmp_path):
    info, levels, path = _make_slide(tmp_path)
    handle = open_container(path, info.slide_id)
    assert handle.info == info
    handle.close()


def test_tiles_roundtrip_bit_exact(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=1000, h=700)
    with open_container(path, info.slide_id) as handle:
        for level in range(info.num_levels):
            cols, rows = info.tile_grid(level)
            for row in range(rows):
                for col in range(cols):
                    tile = read_tile(handle, level, col, row)
                    again = read_tile(handle, level, col, row)
                    assert np.array_equal(tile, again)
                    ts = info.tile_size
                    expected = np.full((ts, ts, 3), 255, dtype=np.uint8)
                    part = levels[level][
                        row * ts : (row + 1) * ts, col * ts : (col + 1) * ts
                    ]
                    expected[: part.shape[0], : part.shape[1]] = part
                    assert np.array_equal(tile, expected)


def test_edge_tile_padding_is_white(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=1000, h=700)
    with open_container(path) as handle:
        last_col = info.tile_grid(0)[0] - 1
        tile = read_tile(handle, 0, last_col, 0)
        # level width 1000, tiles of 256: data ends at column 1000-768=232
        assert np.all(tile[:, 232:, :] == 255)
        assert not np.all(tile[:, :232, :] == 255)


def test_bad_magic(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=300, h=200)
    data = bytearray(path.read_bytes())
    data[:4] = b"\x00\x00\x00\x00"
    path.write_bytes(bytes(data))
    with pytest.raises(BadMagicError):
        open_container(path)


def test_unsupported_version(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=300, h=200)
    data = bytearray(path.read_bytes())
    data[4:8] = (99).to_bytes(4, "little")
    path.write_bytes(bytes(data))
    with pytest.raises(UnsupportedVersionError):
        open_container(path)


def test_truncated_mid_index(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=1024, h=768)
    data = path.read_bytes()
    path.write_bytes(data[:60])  # inside the level-0 index
    with pytest.raises(TruncatedFileError):
        open_container(path)


def test_truncated_payload(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=300, h=200)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 100])
    with pytest.raises(TruncatedFileError):
        open_container(path)


def test_tile_bounds_errors(tmp_path):
    info, levels, path = _make_slide(tmp_path)
    with open_container(path) as handle:
        with pytest.raises(LevelOutOfRangeError):
            read_tile(handle, info.num_levels, 0, 0)
        with pytest.raises(TileOutOfRangeError):
            cols, rows = info.tile_grid(0)
            read_tile(handle, 0, cols, 0)


def test_tile_1_0_matches_base_crop(tmp_path):
    info, levels, path = _make_slide(tmp_path)
    with open_container(path) as handle:
        tile = read_tile(handle, 0, 1, 0)
        assert np.array_equal(tile, levels[0][0:256, 256:512])


def test_region_identity_crop(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=500, h=400)
    with open_container(path) as handle:
        for level in range(info.num_levels):
            w, h = info.level_extent(level)
            region = read_region(handle, level, 0, 0, w, h)
            assert np.array_equal(region, levels[level])


def test_region_right_edge_white_fill(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=500, h=400)
    with open_container(path) as handle:
        region = read_region(handle, 0, 450, 0, 60, 40)
        assert np.all(region[:, 50:, :] == 255)
        assert np.array_equal(region[:, :50, :], levels[0][0:40, 450:500])


def test_region_random_oracle_crops(tmp_path):
    import random

    info, levels, path = _make_slide(tmp_path, w=777, h=555, seed=3)
    rng = random.Random(99)
    with open_container(path) as handle:
        for _ in range(100):
            level = rng.randrange(info.num_levels)
            lw, lh = info.level_extent(level)
            x = rng.randint(-30, lw + 30)
            y = rng.randint(-30, lh + 30)
            w = rng.randint(1, 200)
            h = rng.randint(1, 200)
            region = read_region(handle, level, x, y, w, h)
            assert np.array_equal(region, oracle_crop(levels[level], x, y, w, h))


def test_region_split_composability(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=700, h=300, seed=5)
    with open_container(path) as handle:
        whole = read_region(handle, 0, 100, 50, 300, 120)
        for split in (1, 37, 150, 299):
            left = read_region(handle, 0, 100, 50, split, 120)
            right = read_region(handle, 0, 100 + split, 50, 300 - split, 120)
            assert np.array_equal(np.concatenate([left, right], axis=1), whole)


def test_region_too_large(tmp_path):
    info, levels, path = _make_slide(tmp_path, w=300, h=200)
    with open_container(path) as handle:
        with pytest.raises(RegionTooLargeError):
            read_region(handle, 0, 0, 0, 5000, 5000)


def test_concurrent_reads_match_serial(tmp_path):
    from concurrent.futures import ThreadPoolExecutor

    info, levels, path = _make_slide(tmp_path, w=600, h=600, seed=11)
    with open_container(path) as handle:
        coords = [
            (level, col, row)
            for level in range(info.num_levels)
            for col in range(info.tile_grid(level)[0])
            for row in range(info.tile_grid(level)[1])
        ] * 4
        serial = [read_tile(handle, *c).tobytes() for c in coords]
        with ThreadPoolExecutor(max_workers=8) as pool:
            parallel = list(pool.map(lambda c: read_tile(handle, *c).tobytes(), coords))
        assert serial == parallel
