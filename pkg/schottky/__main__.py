"""Run schottky as a module: python -m schottky."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
