import numpy as np
import pytest

from wignerflow import GaussianSpec, WignerField, init_gaussian, make_grid
from wignerflow import io as wio
from wignerflow.diagnostics import RunDiagnostics
from wignerflow.errors import ContractError


@pytest.fixture
def field():
    g = make_grid(32, 16, -5, 5, -5, 5)
    f = init_gaussian(g, GaussianSpec(0.5, -1.25, 0.6, 0.5))
    return f.with_values(f.values, time=1.25)


def test_dump_round_trip_is_exact(field, tmp_path):
    path = tmp_path / "f.wigf"
    wio.write_dump(field, path)
    back = wio.read_dump(path)
    assert back.grid == field.grid and back.time == field.time
    assert np.array_equal(back.values, field.values)
    assert path.stat().st_size == 4 + 2 + 4 + 4 + 5 * 8 + 8 * 32 * 16


def test_dump_rejects_bad_magic_and_truncation(field):
    data = wio.dump_bytes(field)
    with pytest.raises(ContractError, match="magic"):
        wio.load_bytes(b"XXXX" + data[4:])
    with pytest.raises(ContractError, match="bytes"):
        wio.load_bytes(data[:-8])
    with pytest.raises(ContractError, match="header"):
        wio.load_bytes(data[:10])


def test_csv_round_trip_is_exact():
    rng = np.random.default_rng(3)
    cols = rng.standard_normal((7, 5))
    cols[0] = np.cumsum(np.abs(cols[0])) + 0.1
    diag = RunDiagnostics(*cols)
    text = wio.diagnostics_to_csv(diag)
    assert text.splitlines()[0] == "time,mean_x,mean_p,var_x,var_p,negativity,mass"
    back = wio.diagnostics_from_csv(text)
    for a, b in zip(diag.columns().values(), back.columns().values()):
        assert np.array_equal(a, b)


def test_csv_rejects_wrong_header():
    with pytest.raises(ContractError):
        wio.diagnostics_from_csv("t,x\n1,2\n")


def test_constant_field_heatmap_is_mid_gray(tmp_path):
    g = make_grid(8, 16, -1, 1, -1, 1)
    path = tmp_path / "c.pgm"
    wio.write_heatmap(WignerField(g, np.full(g.shape, 0.3)), path)
    pixels, meta = wio.read_pgm(path)
    assert pixels.shape == (16, 8)
    assert np.all(pixels == 128)
    assert meta["min"] == meta["max"] == 0.3


def test_heatmap_orientation(tmp_path, field):
    path = tmp_path / "g.pgm"
    wio.write_heatmap(field, path)
    pixels, meta = wio.read_pgm(path)
    assert pixels.max() == 255 and pixels.min() == 0
    row, col = np.unravel_index(np.argmax(pixels), pixels.shape)
    g = field.grid
    # p increases upward, so the peak at p0 < 0 sits in the lower half
    assert row > g.np_ // 2
    assert col >= g.nx // 2
    assert meta["max"] == pytest.approx(field.values.max())


def test_side_by_side_panels(field):
    data = wio.side_by_side_heatmap([field, field, field], gap=2)
    head = data.split(b"\n")
    assert head[0] == b"P5" and head[2] == b"100 16"
