import json
import os
import subprocess
from pathlib import Path

import pytest

VLPSIM = str(Path(os.environ.get("VLPSIM", Path(__file__).resolve().parents[2] / "build" / "vlpsim")).resolve())
DEFAULT_SCENARIO = Path(__file__).resolve().parents[2] / "scenarios" / "default.json"


def run(*args, cwd=None):
    return subprocess.run([VLPSIM, *map(str, args)], capture_output=True, text=True, cwd=cwd, timeout=600)


def frame(uid):
    # Preamble, then Manchester (1 -> 10, 0 -> 01), MSB first.
    return "11100" + "".join("10" if (uid >> (7 - i)) & 1 else "01" for i in range(8))


def close_up_scenario(tmp_path, modulated=True, uid=0x5A):
    doc = json.loads(DEFAULT_SCENARIO.read_text())
    lamp = dict(doc["lamps"][0], uid=uid, x=0.0, y=0.0, modulated=modulated)
    doc["lamps"] = [lamp]
    phone = next(a for a in doc["agents"] if a["kind"] == "smartphone")
    # A 175 mm disk 480 px tall, so the blob is well over 420 rows.
    phone.update(x=0.0, y=0.0, z=lamp["z"] - 800.0 * 0.175 / 478.0)
    doc["agents"] = [phone]
    path = tmp_path / "close.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.mark.parametrize("uid", [0, 1, 0x5A, 0xA5, 255])
def test_encode_matches_reference(uid):
    r = run("encode", "--uid", uid)
    assert r.returncode == 0
    assert r.stdout.strip() == frame(uid)


def test_decode_round_trip_and_rotation():
    chips = frame(0xA5) * 2
    r = run("decode", "--chips", chips[7:] + chips[:7])
    assert r.returncode == 0
    assert r.stdout.split()[:2] == ["uid", "165"]


@pytest.mark.parametrize(
    "args,code",
    [
        (["decode", "--chips", "0101"], 2),
        (["decode", "--chips", "01x1"], 1),
        (["decode", "--chips", "0", "--image", "x.pgm"], 1),
        (["decode"], 1),
        (["--bogus"], 1),
        ([], 1),
        (["encode", "--uid", "300"], 1),
        (["simulate", "--scenario", "/nonexistent.json", "--ticks", "1"], 3),
        (["render", "--agent", "nobody", "--out", "x.pgm"], 1),
    ],
)
def test_exit_codes(args, code, tmp_path):
    r = run(*args, cwd=tmp_path)
    assert r.returncode == code, r.stderr
    if code:
        assert r.stderr


def test_render_then_decode_image(tmp_path):
    scenario = close_up_scenario(tmp_path)
    out = tmp_path / "frame.pgm"
    assert run("render", "--scenario", scenario, "--agent", "phone", "--out", out).returncode == 0
    assert out.read_bytes().startswith(b"P5")
    r = run("decode", "--image", out)
    assert r.returncode == 0, r.stderr
    assert "uid 90" in r.stdout


def test_decode_image_of_steady_lamp_fails(tmp_path):
    scenario = close_up_scenario(tmp_path, modulated=False)
    out = tmp_path / "frame.pgm"
    assert run("render", "--scenario", scenario, "--agent", "phone", "--out", out).returncode == 0
    assert run("decode", "--image", out).returncode == 2


def test_simulate_writes_one_row_per_agent_per_tick_deterministically(tmp_path):
    outs = []
    for name in ("a", "b"):
        csv = tmp_path / f"{name}.csv"
        msgs = tmp_path / f"{name}.ndjson"
        r = run("simulate", "--ticks", 300, "--out", csv, "--messages", msgs)
        assert r.returncode == 0, r.stderr
        outs.append((csv.read_bytes(), msgs.read_bytes()))
    assert outs[0] == outs[1]
    lines = outs[0][0].decode().splitlines()
    assert lines[0].startswith("t_ms,agent_id,")
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 600
    assert sum(r[1] == "robot" for r in rows) == 300
    assert len(outs[0][1].decode().splitlines()) == 600


def test_eval_csv(tmp_path):
    r = run("eval", "--ticks", 60, "--agent", "phone")
    assert r.returncode == 0, r.stderr
    lines = r.stdout.splitlines()
    assert lines[0] == "timestamp,agent_id,truth_x,truth_y,truth_z,fix_x,fix_y,fix_z,scheme,residual_px,n_leds"
    assert len(lines) == 61
    assert all(l.split(",")[1] == "phone" for l in lines[1:])
    assert any(l.split(",")[8] != "NoFix" for l in lines[1:])


def test_serve_runs_headless_for_a_few_ticks():
    r = run("serve", "--bind", "127.0.0.1:0", "--headless", "--speed", 0, "--max-ticks", 10)
    assert r.returncode == 0, r.stderr
