import numpy as np
import pytest
from numpy.testing import assert_allclose

from components.plots import plot_multimer, plot_profile
from components.tables import catalog_table, read_csv, rows_table, selfenergy_table, write_csv
from physics.model import EmitterArray
from physics.multimer import plan
from physics.selfenergy import propagator_inv
from physics.waves import classify_waves, resonance_profile


def test_catalog_table_columns():
    df = catalog_table(classify_waves(5, 1, 1e-3))
    assert list(df.columns[:8]) == [
        "j", "kind", "chi_re", "chi_im", "parity", "overlap_with_u", "epsilon_required", "amp_imag_norm",
    ]
    assert [f"a_{i}" for i in range(1, 6)] == list(df.columns[8:])
    assert df["epsilon_required"].isna().all()


def test_selfenergy_table_bound(model, d, quad, E1):
    bundle = propagator_inv(model, EmitterArray(n=4, d=d), E1, quad)
    df = selfenergy_table(bundle, model.m)
    assert_allclose(df["beta_bound"][0], abs(bundle.beta[0]))
    assert_allclose(df["beta_bound"][2], np.exp(-2 * d) * abs(bundle.beta[0]))


def test_write_csv_provenance(tmp_path):
    path = write_csv(rows_table([{"a": 0.1 + 0.2, "b": 1}]), tmp_path / "sub" / "t.csv", "abc123")
    lines = path.read_text().splitlines()
    assert lines[0].endswith(" abc123")
    assert lines[1] == "a,b"
    assert lines[2] == "0.3,1"
    assert_allclose(read_csv(path)["a"], [0.3])


@pytest.mark.parametrize("render", ["profile", "multimer"])
def test_svg_is_deterministic(tmp_path, render):
    def draw(path):
        if render == "profile":
            return plot_profile(resonance_profile(10, 1), 10, 1, path)
        return plot_multimer(plan(3, 2, 1), path)

    first = draw(tmp_path / "a.svg").read_bytes()
    second = draw(tmp_path / "b.svg").read_bytes()
    assert first == second
    assert b"<svg" in first
