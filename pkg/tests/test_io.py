import json

import numpy as np
import pytest

from tlbt import balance, gramians_lyapunov, heat_rod, random_stable, truncate
from tlbt import io as tio
from tlbt.exceptions import ParseError, StabilityError
from tlbt.simulation import Trajectory


def _same(a, b):
    return all(np.array_equal(x, y) for x, y in ((a.A, b.A), (a.B, b.B), (a.C, b.C)))


def test_json_round_trip_is_exact(tmp_path):
    sys = random_stable(5, 2, 3, 11)
    path = tio.write_system(sys, tmp_path / "sys.json")
    back = tio.read_system(path)
    assert (back.n, back.m, back.p) == (5, 2, 3)
    assert _same(sys, back)


def test_mtx_round_trip_is_exact(tmp_path):
    sys = random_stable(4, 1, 2, 12)
    tio.write_system(sys, tmp_path / "mtx")
    assert sorted(p.name for p in (tmp_path / "mtx").iterdir()) == ["A.mtx", "B.mtx", "C.mtx"]
    assert _same(sys, tio.read_system(tmp_path / "mtx"))


def test_nested_rows_accepted(tmp_path):
    doc = {"n": 2, "m": 1, "p": 1, "A": [[-1, 0], [0, -2]], "B": [[1], [1]], "C": [[1, 1]]}
    f = tmp_path / "s.json"
    f.write_text(json.dumps(doc))
    np.testing.assert_array_equal(tio.read_system(f).A, np.diag([-1.0, -2.0]))


@pytest.mark.parametrize(
    "text, needle",
    [
        ('{"n": 1, "m": 1, "p": 1, "A": [-1], "B": [1]', "line"),
        ('{"n": 1, "m": 1, "p": 1, "A": [-1], "B": [1]}', "'C'"),
        ('{"n": 1, "m": 1, "A": [-1], "B": [1], "C": [1]}', "'p'"),
        ('{"n": 2, "m": 1, "p": 1, "A": [-1], "B": [1, 1], "C": [1, 1]}', "'A'"),
        ('{"n": 1, "m": 1, "p": 1, "A": ["x"], "B": [1], "C": [1]}', "'A'"),
        ('{"n": 0, "m": 1, "p": 1, "A": [], "B": [], "C": []}', "'n'"),
        ("[1, 2]", "object"),
    ],
)
def test_malformed_json_names_the_problem(tmp_path, text, needle):
    f = tmp_path / "bad.json"
    f.write_text(text)
    with pytest.raises(ParseError) as exc:
        tio.read_system(f)
    assert needle in str(exc.value)


def test_non_hurwitz_file_rejected_with_abscissa(tmp_path):
    f = tmp_path / "unstable.json"
    f.write_text(json.dumps({"n": 2, "m": 1, "p": 1, "A": [0.25, 0, 0, -1], "B": [1, 1], "C": [1, 1]}))
    with pytest.raises(StabilityError) as exc:
        tio.read_system(f)
    assert exc.value.abscissa == pytest.approx(0.25)
    assert "0.25" in str(exc.value)


def test_missing_mtx_file(tmp_path):
    (tmp_path / "d").mkdir()
    with pytest.raises(ParseError, match="A.mtx"):
        tio.read_system(tmp_path / "d")


def test_rom_round_trip_with_metadata(tmp_path):
    sys = heat_rod(30)
    bal = balance(sys, gramians_lyapunov(sys, 2.0), rank_tol=1e-10)
    rom = truncate(bal, 3)
    back, meta = tio.read_rom(tio.write_rom(rom, tmp_path / "rom.json"))
    assert _same(back, rom.sys_r)
    assert meta["r"] == 3 and meta["horizon"] == 2.0
    assert meta["sigma_kept"] == rom.sigma_kept.tolist()
    assert meta["sigma_truncated"] == rom.sigma_truncated.tolist()


def test_trajectory_csv(tmp_path):
    traj = Trajectory(np.linspace(0, 1, 3), np.array([[0.0, 1.0], [0.1, 1 / 3], [0.2, 2.0]]))
    f = tmp_path / "y.csv"
    tio.write_trajectory(traj, f)
    lines = f.read_text().splitlines()
    assert lines[0] == "t,y1,y2"
    assert float(lines[2].split(",")[2]) == 1 / 3


def test_read_samples(tmp_path):
    f = tmp_path / "u.csv"
    f.write_text("t,u1\n0,0\n1,2\n2,4\n")
    t, v = tio.read_samples(f)
    np.testing.assert_array_equal(t, [0, 1, 2])
    assert v.shape == (3, 1)


@pytest.mark.parametrize(
    "text, needle",
    [("", "empty"), ("x,u1\n0,1\n", "line 1"), ("t,u1\n0,1\n1\n", "line 3"), ("t,u1\n0,a\n1,2\n", "line 2"), ("t,u1\n1,0\n0,1\n", "increasing")],
)
def test_read_samples_errors(tmp_path, text, needle):
    f = tmp_path / "u.csv"
    f.write_text(text)
    with pytest.raises(ParseError, match=needle):
        tio.read_samples(f)
