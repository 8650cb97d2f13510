#!/usr/bin/env python3
"""Run the bundled synthetic evaluation grid and print the summary table.

Thin wrapper over `sikam eval`; results land in results/eval/ by default.
"""

import sys

from sikam.cli import main

if __name__ == "__main__":
    argv = ["eval", "--output-dir", "results/eval"] + sys.argv[1:]
    sys.exit(main(argv))
