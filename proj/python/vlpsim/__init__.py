"""Python access to the visible light positioning simulator core."""

import json

from ._core import (
    VlpError,
    canonical_message,
    decode_chips,
    decode_image,
    detect_rois,
    encode_uid,
    render,
    simulate,
    solve,
)
from ._core import default_scenario as _default_scenario_json

__all__ = [
    "VlpError",
    "canonical_message",
    "decode_chips",
    "decode_image",
    "default_scenario",
    "detect_rois",
    "encode_uid",
    "render",
    "simulate",
    "simulate_messages",
    "solve",
]


def default_scenario():
    """Built-in scene as a dict (same schema as scenario JSON files)."""
    return json.loads(_default_scenario_json())


def simulate_messages(ticks, scenario=None):
    """Runs the loop headless and returns the decoded messages."""
    text = None if scenario is None else json.dumps(scenario)
    return [json.loads(line) for line in simulate(ticks, text)]
