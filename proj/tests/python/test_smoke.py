import json

import numpy as np
import pytest

import vlpsim


def frame(uid):
    return "11100" + "".join("10" if (uid >> (7 - i)) & 1 else "01" for i in range(8))


def test_encode_decode_round_trip():
    for uid in (0, 7, 0xA5, 255):
        chips = vlpsim.encode_uid(uid)
        assert chips == frame(uid)
        assert vlpsim.decode_chips(chips * 2)["uid"] == uid


def test_errors_carry_their_code():
    with pytest.raises(vlpsim.VlpError) as err:
        vlpsim.decode_chips("0101")
    assert err.value.args[1] == "NoSync"


def test_render_detect_decode_close_up():
    scene = vlpsim.default_scenario()
    lamp = dict(scene["lamps"][0], uid=0x3C, x=0.0, y=0.0)
    phone = next(a for a in scene["agents"] if a["kind"] == "smartphone")
    phone.update(x=0.0, y=0.0, z=lamp["z"] - 800.0 * 0.175 / 560.0)
    scene.update(lamps=[lamp], agents=[phone])
    img = vlpsim.render("phone", 0.0, json.dumps(scene))
    assert img.shape == (480, 640)
    assert img.dtype == np.float32
    assert 0.0 <= img.min() and img.max() <= 1.0
    rois = vlpsim.decode_image(img)
    assert len(rois) == 1
    assert rois[0]["uid"] == 0x3C


def test_default_view_has_one_lamp_near_the_projection():
    img = vlpsim.render("phone")
    rois = vlpsim.detect_rois(img)
    assert len(rois) == 1
    u, v = rois[0]["centroid"]
    # Phone sits straight under lamp 4, camera level.
    assert abs(u - 319.5) < 1.0 and abs(v - 239.5) < 1.0


def test_solve_single_led_under_a_lamp():
    obs = [{"uid": 1, "centroid": (319.5, 239.5), "world": (1.0, 1.0, 2.5),
            "equiv_diameter": 800 * 0.175 / 1.5, "physical_diameter": 0.175}]
    fix = vlpsim.solve(obs, known_height=1.0)
    assert fix["scheme"] == "SingleLed"
    assert fix["x"] == pytest.approx(1.0) and fix["y"] == pytest.approx(1.0)


def test_simulation_stream_is_deterministic_and_complete():
    a = vlpsim.simulate(30)
    assert a == vlpsim.simulate(30)
    assert len(a) == 60
    msgs = vlpsim.simulate_messages(30)
    assert {m["type"] for m in msgs} <= {"fix", "diag"}
    assert [m["agent_id"] for m in msgs[:2]] == ["robot", "phone"]
    for line in a:
        assert vlpsim.canonical_message(line) == line
