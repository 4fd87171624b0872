from __future__ import annotations

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecolink.errors import IngestError
from ecolink.ingest import (
    GoldLabel,
    load_datasheets,
    parse_bom,
    parse_gold_labels,
    parse_lca_db,
    write_bom,
    write_datasheets,
    write_gold_labels,
    write_lca_db,
)
from ecolink.model import BomEntry, LcaActivity


def test_parse_bom_semicolon_row():
    text = "name;material;supplier\nSPIRALGEHÄUSE;EN-GJL-250/A48 CL 35B;Mechatronik GmbH\n"
    entries = parse_bom(io.StringIO(text))
    assert entries == [
        BomEntry(
            id="row-1",
            name="SPIRALGEHÄUSE",
            material="EN-GJL-250/A48 CL 35B",
            supplier="Mechatronik GmbH",
            quantity=1.0,
        )
    ]


def test_parse_bom_header_only():
    assert parse_bom(io.StringIO("name,material,supplier\n")) == []


def test_parse_bom_arity_violation_names_line():
    text = "name;material;supplier\nWELLE;C45+N\n"
    with pytest.raises(IngestError, match="line 2"):
        parse_bom(io.StringIO(text))


def test_parse_bom_missing_mandatory_header():
    with pytest.raises(IngestError, match="material"):
        parse_bom(io.StringIO("name;supplier\nA;B\n"))


def test_parse_bom_empty_input():
    with pytest.raises(IngestError, match="header"):
        parse_bom(io.StringIO(""))


def test_parse_bom_comma_autodetect_and_aliases():
    text = "ID,Component,Material,Manufacturer,Qty\nc7,STIFTSCHRAUBE,8.8,SchraubenWerk AG,8\n"
    entries = parse_bom(io.StringIO(text))
    assert entries[0].id == "c7"
    assert entries[0].name == "STIFTSCHRAUBE"
    assert entries[0].supplier == "SchraubenWerk AG"
    assert entries[0].quantity == 8.0


def test_parse_bom_quantity_defaults_and_empty_cells():
    text = "name;material;supplier;quantity\nA;;;\n"
    entries = parse_bom(io.StringIO(text))
    assert entries[0].material == ""
    assert entries[0].supplier == ""
    assert entries[0].quantity == 1.0


def test_parse_bom_bad_quantity_names_line():
    text = "name;material;supplier;quantity\nA;m;s;soon\n"
    with pytest.raises(IngestError, match="line 2.*quantity"):
        parse_bom(io.StringIO(text))


def test_parse_lca_db_record():
    line = (
        '{"id":"a1","name":"Steel production, electric arc furnace, EU",'
        '"description":"This process models the production of steel…",'
        '"emission_factor":1.4,"unit":"kg CO2e/kg"}\n'
    )
    acts = parse_lca_db(io.StringIO(line))
    assert acts == [
        LcaActivity(
            id="a1",
            name="Steel production, electric arc furnace, EU",
            description="This process models the production of steel…",
            emission_factor=1.4,
            unit="kg CO2e/kg",
        )
    ]


def test_parse_lca_db_empty_file():
    assert parse_lca_db(io.StringIO("")) == []


def test_parse_lca_db_duplicate_id():
    lines = (
        '{"id":"a1","name":"X","description":"","emission_factor":1,"unit":"kg"}\n'
        '{"id":"a1","name":"Y","description":"","emission_factor":2,"unit":"kg"}\n'
    )
    with pytest.raises(IngestError, match="duplicate id 'a1'"):
        parse_lca_db(io.StringIO(lines))


def test_parse_lca_db_negative_factor():
    line = '{"id":"a1","name":"X","description":"","emission_factor":-0.1,"unit":"kg"}\n'
    with pytest.raises(IngestError, match="emission_factor"):
        parse_lca_db(io.StringIO(line))


def test_parse_lca_db_missing_key_names_line():
    with pytest.raises(IngestError, match="line 1.*'unit'"):
        parse_lca_db(io.StringIO('{"id":"a1","name":"X","description":"","emission_factor":1}\n'))


def test_load_datasheets_reads_and_sorts(tmp_path):
    (tmp_path / "ibitech57.txt").write_text("Woven polypropylene…", encoding="utf-8")
    (tmp_path / "aaa.txt").write_text("first", encoding="utf-8")
    (tmp_path / "ignored.pdf").write_bytes(b"%PDF")
    sheets = load_datasheets(tmp_path)
    assert [s.filename for s in sheets] == ["aaa.txt", "ibitech57.txt"]
    assert sheets[1].body == "Woven polypropylene…"


def test_load_datasheets_empty_dir(tmp_path):
    assert load_datasheets(tmp_path) == []


def test_load_datasheets_missing_dir(tmp_path):
    with pytest.raises(IngestError, match="not found"):
        load_datasheets(tmp_path / "nope")


def test_parse_gold_labels_basic():
    labels = parse_gold_labels(io.StringIO('{"component_id":"c1","activity_id":"a1"}\n'))
    assert labels == [GoldLabel("c1", "a1")]


def test_parse_gold_labels_empty():
    assert parse_gold_labels(io.StringIO("")) == []


def test_parse_gold_labels_21_lines():
    text = "".join(
        f'{{"component_id":"c{i}","activity_id":"a{i}"}}\n' for i in range(1, 22)
    )
    assert len(parse_gold_labels(io.StringIO(text))) == 21


def test_parse_gold_labels_malformed_line_number():
    text = '{"component_id":"c1","activity_id":"a1"}\nnot json\n'
    with pytest.raises(IngestError, match="line 2"):
        parse_gold_labels(io.StringIO(text))


_id_text = st.text(
    st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=12
).map(str.strip).filter(bool)
_cell_text = st.text(
    st.characters(blacklist_categories=("Cs", "Cc")), max_size=20
).map(str.strip)


@st.composite
def bom_entries(draw):
    n = draw(st.integers(min_value=0, max_value=8))
    entries = []
    for i in range(n):
        entries.append(
            BomEntry(
                id=f"c{i}",
                name=draw(_id_text),
                material=draw(_cell_text),
                supplier=draw(_cell_text),
                quantity=draw(
                    st.floats(min_value=0, max_value=1e6, allow_nan=False, width=64)
                ),
            )
        )
    return entries


@settings(max_examples=60, deadline=None)
@given(bom_entries())
def test_bom_round_trip(entries):
    buffer = io.StringIO()
    write_bom(entries, buffer)
    parsed = parse_bom(io.StringIO(buffer.getvalue()))
    buffer2 = io.StringIO()
    write_bom(parsed, buffer2)
    assert parse_bom(io.StringIO(buffer2.getvalue())) == parsed
    assert parsed == entries


@settings(max_examples=40, deadline=None)
@given(
    st.lists(
        st.tuples(_cell_text.filter(bool), _cell_text, st.floats(0, 100, allow_nan=False)),
        max_size=6,
    )
)
def test_lca_db_round_trip(rows):
    activities = [
        LcaActivity(id=f"a{i}", name=name, description=desc, emission_factor=f, unit="kg")
        for i, (name, desc, f) in enumerate(rows)
    ]
    buffer = io.StringIO()
    write_lca_db(activities, buffer)
    assert parse_lca_db(io.StringIO(buffer.getvalue())) == activities


def test_gold_round_trip():
    labels = [GoldLabel("c1", "a1"), GoldLabel("c2", "a9")]
    buffer = io.StringIO()
    write_gold_labels(labels, buffer)
    assert parse_gold_labels(io.StringIO(buffer.getvalue())) == labels


def test_datasheet_round_trip(tmp_path, demo_corpus):
    write_datasheets(demo_corpus.datasheets, tmp_path)
    assert load_datasheets(tmp_path) == demo_corpus.datasheets
