"""Bundle the package into a single runnable file, dist/slate.pyz.

    python3 scripts/build_zipapp.py [--output PATH]
    python3 dist/slate.pyz notes.txt

The archive holds only the slate sources and runs on any Python 3.10+
that has curses; nothing is installed.
"""

import argparse
import shutil
import tempfile
import zipapp
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build(output: Path) -> Path:
    output.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        staging = Path(tmp) / "app"
        shutil.copytree(ROOT / "src" / "slate", staging / "slate", ignore=shutil.ignore_patterns("__pycache__"))
        zipapp.create_archive(
            staging,
            target=output,
            interpreter="/usr/bin/env python3",
            main="slate.cli:console",
            compressed=True,
        )
    return output


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--output", type=Path, default=ROOT / "dist" / "slate.pyz")
    args = parser.parse_args()
    print(build(args.output))


if __name__ == "__main__":
    main()
