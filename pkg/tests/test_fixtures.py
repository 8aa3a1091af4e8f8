from __future__ import annotations

from build_fixtures import FIXTURES, build

from trusskit import fixtures


def test_bundled_fixtures_match_their_definitions(tmp_path):
    build(tmp_path)
    for name in FIXTURES:
        assert (tmp_path / f"{name}.json").read_bytes() == fixtures.raw(name), name
    assert sorted(FIXTURES) == fixtures.names()
