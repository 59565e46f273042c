"""Reads a feature pair with plain struct unpacking and compares every value
bit for bit with the expectation written next to it."""
import json
import pathlib
import struct
import sys


def main(directory: str) -> int:
    d = pathlib.Path(directory)
    expected = json.loads((d / "features.expected.json").read_text())
    sidecar = json.loads((d / "features.json").read_text())
    raw = (d / "features.f32").read_bytes()
    problems = []
    rows, dim = expected["rows"], expected["dim"]
    if sidecar.get("rows") != rows or sidecar.get("dim") != dim:
        problems.append(f"sidecar shape {sidecar.get('rows')}x{sidecar.get('dim')} != {rows}x{dim}")
    if sidecar.get("dtype") != "float32" or sidecar.get("byte_order") != "little":
        problems.append(f"sidecar dtype/byte_order: {sidecar.get('dtype')}/{sidecar.get('byte_order')}")
    for key, value in expected["meta"].items():
        if sidecar.get("meta", {}).get(key) != value:
            problems.append(f"sidecar meta.{key} = {sidecar.get('meta', {}).get(key)!r}, expected {value!r}")
    if len(raw) != rows * dim * 4:
        problems.append(f"{len(raw)} bytes, expected {rows * dim * 4}")
    else:
        got = struct.unpack(f"<{rows * dim}I", raw)
        bad = [i for i, (a, b) in enumerate(zip(got, expected["bits"])) if a != b]
        if bad:
            problems.append(f"{len(bad)} values differ, first at row {bad[0] // dim} col {bad[0] % dim}")
    for p in problems:
        print("FAIL:", p)
    if not problems:
        print(f"ok: {rows}x{dim} little-endian float32 matches bit for bit")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
