"""Regenerate the bundled synthetic train/test wordlists.

    python scripts/make_synthetic.py            # rewrite src/cognates/data/
    python scripts/make_synthetic.py --out DIR  # write elsewhere
"""

import argparse
from pathlib import Path

from cognates.synthetic import write_bundled

DEFAULT = Path(__file__).resolve().parents[1] / "src" / "cognates" / "data"

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=DEFAULT)
    for path in write_bundled(parser.parse_args().out):
        print(path)
