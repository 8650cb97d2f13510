#!/usr/bin/env python3
"""Time the kernel stages over a ladder of problem sizes.

Thin wrapper over `sikam bench`. The default ladder doubles the shift range
at fixed size (shift-similarity should double, specmurt-similarity should
not move) and doubles the frame count at delta=0 (baseline should roughly
quadruple).
"""

import sys

from sikam.cli import main

if __name__ == "__main__":
    argv = ["bench", "--output", "results/bench.json"] + sys.argv[1:]
    sys.exit(main(argv))
