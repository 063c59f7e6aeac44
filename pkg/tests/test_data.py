import json

import numpy as np
import pytest

from satett.data import (
    SubgroupTarget,
    load_csv,
    make_dataset,
    subgroup_masks,
    validate,
    write_csv,
)
from satett.errors import (
    DomainError,
    EmptyInputError,
    NotFoundError,
    SchemaError,
)

SCHEMA = {
    "outcome": "y",
    "treatment": "trt",
    "source": "src",
    "subgroup": "grp",
    "covariates": ["age", "score"],
}


def _toy():
    y = [1.0, 2.0, 3.0, 4.0]
    a = [1, 0, 1, 0]
    s = [1, 1, 0, 0]
    v = [1, 1, 0, 1]
    x = [[0.1, 1.0], [0.2, 2.0], [0.3, 3.0], [0.4, 4.0]]
    return make_dataset(y, a, s, v, x, covariate_names=("age", "score"))


def test_make_dataset_shapes():
    d = _toy()
    assert d.n == 4
    assert d.p == 2
    assert d.xtilde.shape == (4, 2)


def test_dataset_is_immutable():
    d = _toy()
    with pytest.raises(ValueError):
        d.y[0] = 99.0
    with pytest.raises(ValueError):
        d.a[0] = 0


def test_nonbinary_treatment_rejected():
    with pytest.raises(DomainError):
        make_dataset([1.0], [2], [1], [0], [[0.0]])


def test_nonbinary_source_rejected():
    with pytest.raises(DomainError):
        make_dataset([1.0], [1], [-1], [0], [[0.0]])


def test_empty_input_rejected():
    with pytest.raises(EmptyInputError):
        make_dataset([], [], [], [], np.empty((0, 1)))


def test_csv_round_trip(tmp_path):
    d = _toy()
    path = tmp_path / "trial.csv"
    write_csv(d, path, SCHEMA)
    back = load_csv(path, SCHEMA)
    np.testing.assert_array_equal(back.y, d.y)
    np.testing.assert_array_equal(back.a, d.a)
    np.testing.assert_array_equal(back.s, d.s)
    np.testing.assert_array_equal(back.v, d.v)
    np.testing.assert_allclose(back.xtilde, d.xtilde, rtol=0, atol=0)


def test_csv_missing_column_names_it(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("y,trt,src,age,score\n1.0,1,1,0.1,1.0\n")
    with pytest.raises(SchemaError, match="grp"):
        load_csv(path, SCHEMA)


def test_csv_nonbinary_cites_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "y,trt,src,grp,age,score\n"
        "1.0,1,1,1,0.1,1.0\n"
        "2.0,7,1,0,0.2,2.0\n"
    )
    with pytest.raises(DomainError, match="row 1"):
        load_csv(path, SCHEMA)


def test_csv_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("y,trt,src,grp,age,score\n")
    with pytest.raises(EmptyInputError):
        load_csv(path, SCHEMA)


def test_validate_clean_dataset(random_dataset):
    assert validate(random_dataset) == []


def test_validate_flags_empty_cell():
    # subgroup v=1 has no treated trial rows
    d = make_dataset(
        [1.0, 2.0, 3.0, 4.0],
        [0, 0, 1, 0],
        [1, 1, 1, 1],
        [1, 1, 0, 0],
        [[0.0], [1.0], [2.0], [3.0]],
    )
    msgs = validate(d)
    assert any("v=1" in m for m in msgs)


def test_subgroup_masks_counts(random_dataset):
    d = random_dataset
    trial_v, treated_v, control_v = subgroup_masks(d, SubgroupTarget(v=1))
    assert trial_v.size == np.sum((d.s == 1) & (d.v == 1))
    assert treated_v.size == np.sum((d.v == 1) & (d.a == 1))
    assert control_v.size == np.sum((d.v == 1) & (d.a == 0))


def test_subgroup_masks_missing_subgroup():
    d = make_dataset([1.0, 2.0], [1, 0], [1, 1], [0, 0], [[0.0], [1.0]])
    with pytest.raises(NotFoundError):
        subgroup_masks(d, SubgroupTarget(v=1))


def test_mixed_data_against_row_scan(random_dataset):
    # index sets verified against an independent row-by-row scan
    d = random_dataset
    for v in (0, 1):
        trial_v, treated_v, control_v = subgroup_masks(d, SubgroupTarget(v=v))
        scan_trial = [i for i in range(d.n) if d.s[i] == 1 and d.v[i] == v]
        scan_treat = [i for i in range(d.n) if d.a[i] == 1 and d.v[i] == v]
        scan_ctrl = [i for i in range(d.n) if d.a[i] == 0 and d.v[i] == v]
        assert trial_v.tolist() == scan_trial
        assert treated_v.tolist() == scan_treat
        assert control_v.tolist() == scan_ctrl


def test_published_sidecar_schema_accepts_mapping():
    import jsonschema

    from satett.schemas import DATA_SIDECAR_SCHEMA

    jsonschema.validate(SCHEMA, DATA_SIDECAR_SCHEMA)


def test_published_schema_files_match_package():
    import pathlib

    from satett.schemas import ALL_SCHEMAS

    root = pathlib.Path(__file__).resolve().parents[1] / "docs" / "schemas"
    for name, schema in ALL_SCHEMAS.items():
        on_disk = json.loads((root / f"{name}.schema.json").read_text())
        assert on_disk == schema
