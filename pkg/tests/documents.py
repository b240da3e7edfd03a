"""Helpers that write JSON documents for repository and command-line tests."""
import json
from pathlib import Path

PAIR2 = {"format": 1, "kind": "groupoid", "constructor": {"kind": "pair", "n": 2}}
PAIR3 = {"format": 1, "kind": "groupoid", "constructor": {"kind": "pair", "n": 3}}
Z2 = {"format": 1, "kind": "groupoid", "constructor": {"kind": "group", "name": "Z2"}}
C_TIMES_C = {"format": 1, "kind": "field_product", "n": 2}
SPLIT_MAP = {
    "format": 1,
    "kind": "linear_map",
    "columns": {"0": {"0": "1/2", "1": "1/2"}, "1": {"0": "1/2", "1": "-1/2"}},
}
UNIT_SQUARE = {"format": 1, "kind": "disk", "dim": 2, "generators": [["1", "0"], ["0", "1"]]}
HARMONIC = {
    "format": 1,
    "kind": "sequence",
    "dim": 2,
    "points": [[f"1/{n}", "0"] for n in range(1, 33)],
    "limit": ["0", "0"],
}
CECH3 = {"format": 1, "kind": "bibundle", "constructor": {"kind": "cech", "points": 3, "cover": [[0, 1], [1, 2]]}}
TERMINAL_PAIR2 = {"format": 1, "kind": "bibundle", "constructor": {"kind": "terminal", "groupoid": {"kind": "pair", "n": 2}}}
POINT_PAIR2 = {"format": 1, "kind": "bibundle", "constructor": {"kind": "point", "groupoid": {"kind": "pair", "n": 2}, "object": 1}}
# the bibundle of Z2 -> 1: right principal, but Z2 does not act freely on its point
NOT_PRINCIPAL = {"format": 1, "kind": "bibundle", "constructor": {"kind": "terminal", "groupoid": {"kind": "group", "name": "Z2"}}}


def write(tmp_path: Path, name: str, data) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)
