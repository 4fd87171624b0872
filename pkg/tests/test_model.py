from __future__ import annotations

import math

import pytest

from ecolink.model import (
    BomEntry,
    Embedding,
    LcaActivity,
    PipelineConfig,
    validate_activities,
    validate_bom,
)


def test_validate_bom_accepts_plain_row():
    entries = [
        BomEntry(id="c1", name="WELLE", material="C45+N", supplier="Technikbau AG", quantity=1)
    ]
    assert validate_bom(entries) == []


def test_validate_bom_empty_is_valid():
    assert validate_bom([]) == []


def test_validate_bom_flags_empty_name():
    issues = validate_bom([BomEntry(id="c1", name="")])
    assert len(issues) == 1
    assert issues[0].entry_id == "c1"
    assert issues[0].field == "name"


def test_validate_bom_flags_duplicate_id_and_negative_quantity():
    entries = [
        BomEntry(id="c1", name="A"),
        BomEntry(id="c1", name="B", quantity=-2),
    ]
    fields = {(i.entry_id, i.field) for i in validate_bom(entries)}
    assert ("c1", "id") in fields
    assert ("c1", "quantity") in fields


def test_validate_bom_flags_nan_quantity():
    issues = validate_bom([BomEntry(id="c1", name="A", quantity=math.nan)])
    assert [i.field for i in issues] == ["quantity"]


def test_validate_activities_flags_duplicates_and_negative_factor():
    acts = [
        LcaActivity(id="a1", name="X", description="", emission_factor=1.0, unit="kg"),
        LcaActivity(id="a1", name="Y", description="", emission_factor=-1.0, unit="kg"),
    ]
    fields = {(i.entry_id, i.field) for i in validate_activities(acts)}
    assert ("a1", "id") in fields
    assert ("a1", "emission_factor") in fields


def test_embedding_dim_and_equality():
    a = Embedding([1.0, 0.0, 0.0])
    b = Embedding([1.0, 0.0, 0.0])
    c = Embedding([0.0, 1.0, 0.0])
    assert a.dim == 3
    assert a == b
    assert a != c


def test_embedding_is_normalized_window():
    assert Embedding([1.0, 0.0]).is_normalized()
    assert not Embedding([1.0, 1.0]).is_normalized()


def test_embedding_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Embedding([])
    with pytest.raises(ValueError):
        Embedding([[1.0, 2.0], [3.0, 4.0]])


def test_embedding_values_are_read_only():
    emb = Embedding([1.0, 2.0])
    with pytest.raises(ValueError):
        emb.values[0] = 9.0


def test_config_defaults_match_documented_values():
    config = PipelineConfig()
    assert config.datasheet_threshold == 0.5
    assert config.top_k == 5
    assert config.hits_at == (1, 5)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"datasheet_threshold": 1.5},
        {"datasheet_threshold": -1.5},
        {"top_k": 0},
        {"hits_at": (0,)},
        {"parallelism": 0},
    ],
)
def test_config_rejects_out_of_range(kwargs):
    with pytest.raises(ValueError):
        PipelineConfig(**kwargs)
