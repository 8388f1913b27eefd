"""Recompute the g = 3 window table and compare with the printed values."""
import sys

from sombrero.cli import main

if __name__ == "__main__":
    sys.exit(main(["table1"] + sys.argv[1:]))
