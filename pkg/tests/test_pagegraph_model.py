from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refweave.errors import SchemaViolation
from refweave.pagegraph import (
    Box,
    LinkAnnotation,
    Page,
    PageGraph,
    load_pagegraph_json,
    reading_order,
    serialize_pagegraph,
    validate_pagegraph,
)
from conftest import make_graph, make_page, run_at


def test_roundtrip_identity(single_page_graph):
    data = serialize_pagegraph(single_page_graph)
    assert load_pagegraph_json(data) == single_page_graph


def test_roundtrip_with_links():
    link = LinkAnnotation(
        source_page=0,
        source_rect=Box(10.0, 10.0, 30.0, 20.0),
        target_page=1,
        target_point=(72.0, 100.5),
        kind="internal",
    )
    ext = LinkAnnotation(
        source_page=0,
        source_rect=Box(40.0, 10.0, 60.0, 20.0),
        target_page=-1,
        target_point=(0.0, 0.0),
        kind="external",
    )
    pages = [
        make_page([run_at(72.0, 100.0, "alpha")], index=0, links=[link, ext]),
        make_page([run_at(72.0, 50.0, "beta")], index=1),
    ]
    graph = make_graph(pages)
    assert load_pagegraph_json(serialize_pagegraph(graph)) == graph


def test_serialization_is_byte_deterministic(single_page_graph):
    assert serialize_pagegraph(single_page_graph) == serialize_pagegraph(single_page_graph)


def test_bad_box_reports_path(single_page_graph):
    raw = json.loads(serialize_pagegraph(single_page_graph))
    raw["pages"][0]["runs"][0]["bbox"] = [100, 90, 50, 95]  # x0 > x1
    with pytest.raises(SchemaViolation) as err:
        load_pagegraph_json(json.dumps(raw))
    assert err.value.path == "pages[0].runs[0].bbox"


def test_page_gap_rejected(single_page_graph):
    raw = json.loads(serialize_pagegraph(single_page_graph))
    raw["pages"][0]["index"] = 2  # pages [2] instead of [0]
    with pytest.raises(SchemaViolation) as err:
        load_pagegraph_json(json.dumps(raw))
    assert "index" in err.value.path


def test_missing_field_reports_path(single_page_graph):
    raw = json.loads(serialize_pagegraph(single_page_graph))
    del raw["pages"][0]["runs"][0]["font_size"]
    with pytest.raises(SchemaViolation) as err:
        load_pagegraph_json(json.dumps(raw))
    assert err.value.path == "pages[0].runs[0].font_size"


def test_reading_index_permutation_enforced(single_page_graph):
    raw = json.loads(serialize_pagegraph(single_page_graph))
    raw["pages"][0]["runs"][0]["reading_index"] = 5
    with pytest.raises(SchemaViolation):
        load_pagegraph_json(json.dumps(raw))


def test_internal_link_target_must_exist(single_page_graph):
    raw = json.loads(serialize_pagegraph(single_page_graph))
    raw["pages"][0]["links"] = [
        {
            "source_page": 0,
            "source_rect": [1, 1, 2, 2],
            "target_page": 7,
            "target_point": [0, 0],
            "kind": "internal",
        }
    ]
    with pytest.raises(SchemaViolation) as err:
        load_pagegraph_json(json.dumps(raw))
    assert "target_page" in err.value.path


def test_run_outside_page_rejected():
    page = Page(index=0, width=100.0, height=100.0)
    page.runs = [run_at(90.0, 50.0, "toolongword")]
    page.runs[0].reading_index = 0
    graph = PageGraph(source_id="x", pages=[page])
    with pytest.raises(SchemaViolation):
        validate_pagegraph(graph)


@st.composite
def page_graphs(draw):
    n_pages = draw(st.integers(min_value=1, max_value=3))
    pages = []
    for index in range(n_pages):
        n_runs = draw(st.integers(min_value=0, max_value=6))
        runs = []
        for _ in range(n_runs):
            x = draw(st.integers(min_value=0, max_value=400))
            baseline = draw(st.integers(min_value=20, max_value=700))
            text = draw(st.text(alphabet="abcxyz[]().123 ", min_size=1, max_size=8))
            if not text.strip():
                text = "w"
            font = draw(st.sampled_from([8.0, 10.0, 12.0]))
            runs.append(run_at(float(x), float(baseline), text.strip() or "w", font))
        links = []
        if draw(st.booleans()):
            links.append(
                LinkAnnotation(
                    source_page=index,
                    source_rect=Box(5.0, 5.0, 25.0, 15.0),
                    target_page=draw(st.integers(min_value=0, max_value=n_pages - 1)),
                    target_point=(float(draw(st.integers(0, 600))), 10.25),
                    kind="internal",
                )
            )
        pages.append(make_page(runs, index=index, links=links))
    return make_graph(pages)


@given(page_graphs())
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(graph):
    assert load_pagegraph_json(serialize_pagegraph(graph)) == graph


@given(page_graphs())
@settings(max_examples=30, deadline=None)
def test_serialized_numbers_capped_at_three_decimals(graph):
    import re

    for token in re.findall(rb"-?\d+\.\d+", serialize_pagegraph(graph)):
        assert len(token.split(b".")[1]) <= 3, token


@given(page_graphs())
@settings(max_examples=40, deadline=None)
def test_reading_order_permutation_and_idempotent(graph):
    for page in graph.pages:
        first = [r.reading_index for r in page.runs]
        assert sorted(first) == list(range(len(page.runs)))
        reading_order(page)
        assert [r.reading_index for r in page.runs] == first
