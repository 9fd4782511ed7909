"""Slide store: registry, anonymizing import, manifest handling."""

import numpy as np
import pytest

from pathharbor.errors import NotFoundError
from pathharbor.slides.readers import SourceUnreadableError, write_ppm
from pathharbor.slides.store import SlideStore
from pathharbor.slides.synthetic import SlideSpec


@pytest.fixture
def store(tmp_path):
    return SlideStore(tmp_path / "slides")


def test_add_synthetic_and_list(store):
    info, sheet = store.add_synthetic(1, SlideSpec(width=300, height=200, n_positive=2, n_negative=3))
    assert store.has_slide(info.slide_id)
    assert [s.slide_id for s in store.list_slides()] == [info.slide_id]
    assert store.get_info(info.slide_id) == info
    assert store.ground_truth(info.slide_id) == sheet


def test_unknown_slide(store):
    with pytest.raises(NotFoundError):
        store.get_handle("f" * 32)
    assert not store.has_slide("../../etc/passwd")
    assert not store.has_slide("")


def test_import_strips_alias_bytes(store, tmp_path):
    info, _ = store.add_synthetic(2, SlideSpec(width=300, height=200, n_positive=2, n_negative=2))
    source = store.data_dir / f"{info.slide_id}.ptc"
    alias = "CASE-0012"
    imported, entry = store.import_and_anonymize(source, alias)
    out_path = store.data_dir / f"{imported.slide_id}.ptc"
    assert alias.encode() not in out_path.read_bytes()
    assert entry == {"case_alias": alias, "slide_id": imported.slide_id}
    assert store.manifest() == [entry]


def test_import_twice_distinct_ids_same_pixels(store):
    info, _ = store.add_synthetic(3, SlideSpec(width=300, height=200, n_positive=1, n_negative=1))
    source = store.data_dir / f"{info.slide_id}.ptc"
    a, _ = store.import_and_anonymize(source, "one")
    b, _ = store.import_and_anonymize(source, "two")
    assert a.slide_id != b.slide_id
    bytes_a = (store.data_dir / f"{a.slide_id}.ptc").read_bytes()
    bytes_b = (store.data_dir / f"{b.slide_id}.ptc").read_bytes()
    assert bytes_a == bytes_b  # id lives outside the container


def test_import_source_path_never_leaks(store, tmp_path):
    rng = np.random.default_rng(0)
    image = rng.integers(200, 256, size=(120, 150, 3), dtype=np.uint8)
    source = tmp_path / "patientX.ppm"
    write_ppm(source, image)
    imported, _ = store.import_and_anonymize(source, "alias-77")
    data = (store.data_dir / f"{imported.slide_id}.ptc").read_bytes()
    assert b"patientX" not in data
    assert b"alias-77" not in data


def test_import_ppm_builds_pyramid(store, tmp_path):
    rng = np.random.default_rng(1)
    image = rng.integers(0, 256, size=(600, 500, 3), dtype=np.uint8)
    source = tmp_path / "raw.ppm"
    write_ppm(source, image)
    imported, _ = store.import_and_anonymize(source, "ppm-case")
    assert imported.num_levels == 3  # 600 -> 300 -> 150 with tile 256... 500x600 needs 3? see below
    handle = store.get_handle(imported.slide_id)
    from pathharbor.slides.container import read_region

    region = read_region(handle, 0, 0, 0, 500, 600)
    assert np.array_equal(region, image)


def test_import_unreadable_source(store, tmp_path):
    bad = tmp_path / "junk.bin"
    bad.write_bytes(b"\x01\x02\x03\x04")
    with pytest.raises(SourceUnreadableError):
        store.import_and_anonymize(bad, "x")
    with pytest.raises(SourceUnreadableError):
        store.import_and_anonymize(tmp_path / "missing.ptc", "x")
