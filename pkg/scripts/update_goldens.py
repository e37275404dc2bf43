"""Rewrite tests/golden/*.txt from the scenarios in tests/scenarios.py.

Run after an intended rendering change, then review the diff.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from scenarios import GOLDENS  # noqa: E402

from slate.render import render  # noqa: E402


def main():
    out = ROOT / "tests" / "golden"
    out.mkdir(exist_ok=True)
    for name, (build, size) in GOLDENS.items():
        path = out / f"{name}.txt"
        path.write_text(render(build(), size).dump(), encoding="utf-8")
        print(path.relative_to(ROOT))


if __name__ == "__main__":
    main()
