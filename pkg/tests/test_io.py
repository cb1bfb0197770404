import json

import numpy as np
import pytest

from imbrex import catalog
from imbrex.io import FormatError, dumps, load, save, sha256_file
from imbrex.mm import EmbeddedMMSet


def test_geometry_round_trip(tmp_path, segre12):
    path = tmp_path / "g.json"
    save(segre12, path)
    back = load(path)
    assert back == segre12 and back.name == segre12.name
    d = json.loads(path.read_text())
    assert set(d) == {"name", "point_count", "lines"}


def test_embedded_round_trip(tmp_path):
    e = catalog.segre_embedding(1, 2, 2)
    path = tmp_path / "e.json"
    save(e, path)
    back = load(path)
    assert isinstance(back, EmbeddedMMSet)
    assert np.array_equal(back.points, e.points)
    assert sorted(back.xi) == sorted(e.xi) and (back.d, back.r) == (e.d, e.r)
    assert back.geometry == e.geometry


def test_output_is_canonical(tmp_path, segre12):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save(segre12, a)
    save(catalog.build("segre", p=1, r=2, q=2), b)
    assert sha256_file(a) == sha256_file(b)
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}\n'


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    '{"lines": [[0, 1]]}',
    '{"point_count": 2, "lines": [[0, 5]]}',
    '{"field": {"p": 2, "k": 1}, "ambient_dim": 2, "points": [[1, 0]], "d": 0, "r": 0}',
    '{"field": {"p": 2, "k": 1}, "ambient_dim": 1, "points": [[1, 3]], "d": 0, "r": 0}',
    '{"field": {"p": 2, "k": 1}, "points": [[1, 0]]}',
])
def test_malformed_input(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(FormatError):
        load(path)
