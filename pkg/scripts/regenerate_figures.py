"""Write the curve data behind the three published figures to results/figures/."""
import sys
from pathlib import Path

from sombrero.cli import main

OUT = Path(__file__).resolve().parent.parent / "results" / "figures"

if __name__ == "__main__":
    for fig in (1, 2, 3):
        code = main(["figdata", "--figure", str(fig), "--out", str(OUT)])
        if code:
            sys.exit(code)
    print(f"wrote {OUT}")
