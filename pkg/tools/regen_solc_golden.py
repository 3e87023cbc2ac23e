#!/usr/bin/env python3
"""Regenerate fixtures/golden/*.layout.json from real solc output.

Requires a solc >= 0.8 binary on PATH. The checked-in golden files were
derived from solc's documented storage rules; run this wherever solc is
installed to confirm they match the compiler bit-for-bit:

    python3 tools/regen_solc_golden.py [--check]
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
EQUIV = REPO / "tools" / "solc_equiv"
GOLDEN = REPO / "fixtures" / "golden"

KEEP_TYPE_FIELDS = ("encoding", "numberOfBytes")


def solc_storage_layout(sol_path: Path) -> dict:
    out = subprocess.run(
        ["solc", "--storage-layout", str(sol_path)],
        capture_output=True,
        text=True,
        check=True,
    ).stdout
    # solc prints a header line, then the JSON document
    json_start = out.index("{")
    raw = json.loads(out[json_start:])
    storage = [
        {"label": e["label"], "offset": e["offset"], "slot": e["slot"], "type": e["type"]}
        for e in raw["storage"]
    ]
    types = {
        key: {f: val[f] for f in KEEP_TYPE_FIELDS if f in val}
        for key, val in (raw.get("types") or {}).items()
    }
    return {"storage": storage, "types": types}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="compare instead of rewriting")
    args = parser.parse_args()

    failures = 0
    for sol_path in sorted(EQUIV.glob("*.sol")):
        golden_path = GOLDEN / f"{sol_path.stem}.layout.json"
        layout = solc_storage_layout(sol_path)
        if args.check:
            existing = json.loads(golden_path.read_text())
            if existing == layout:
                print(f"OK   {golden_path.name}")
            else:
                print(f"DIFF {golden_path.name}")
                failures += 1
        else:
            golden_path.write_text(json.dumps(layout, indent=2) + "\n")
            print(f"wrote {golden_path.name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
