from __future__ import annotations

import pathlib
import xml.etree.ElementTree as ET

import pytest

from make_golden import cases
from trusskit import fixtures
from trusskit.errors import DimensionUnsupported
from trusskit.render import RenderOptions, render_svg, slices_text, stratum_color

GOLDEN = pathlib.Path(__file__).parent / "golden"
CASES = cases()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    X, opts = CASES[name]
    assert render_svg(X, opts) == (GOLDEN / f"{name}.svg").read_bytes()


@pytest.mark.parametrize("name", sorted(CASES))
def test_output_is_well_formed(name):
    X, opts = CASES[name]
    root = ET.fromstring(render_svg(X, opts))
    assert root.tag.endswith("svg")


def test_deterministic():
    X = fixtures.get("circle").strat
    assert render_svg(X) == render_svg(X)


def test_colors_are_stable_hex():
    c = stratum_color((1, 1))
    assert c == stratum_color((1, 1)) and len(c) == 7 and c.startswith("#")


def test_emphasis_draws_black():
    X = fixtures.get("pt2").strat
    plain = render_svg(X)
    strong = render_svg(X, RenderOptions(emphasize=frozenset({"0"})))
    assert b'fill="black"' in strong and b'fill="black"' not in plain


def test_three_dimensional_unsupported():
    with pytest.raises(DimensionUnsupported):
        render_svg(fixtures.get("braid").strat)
    with pytest.raises(DimensionUnsupported):
        render_svg(fixtures.get("split_1_2").bundle.strat)


def test_slices():
    text = slices_text(fixtures.get("braid").bundle)
    assert text.startswith("level 1:\n  .: RSR\n")
    labeled = slices_text(fixtures.get("pt2").bundle, fixtures.get("pt2").strat.labeling)
    assert "  1: RSR  [1 0 1]" in labeled
