#!/usr/bin/env python3
"""Run the noise-folding sweep (recovered SNR vs. subsampling at several
input SNRs) with the repo config; outputs land in ./out_noise_folding.

Usage: python scripts/run_noise_folding.py [--trials N] [--seed N]
"""

import sys
from pathlib import Path

from cslab.cli import main

REPO = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    argv = ["noise-folding", "--config", str(REPO / "configs" / "noise_folding.json"),
            "--out", "out_noise_folding", *sys.argv[1:]]
    raise SystemExit(main(argv))
