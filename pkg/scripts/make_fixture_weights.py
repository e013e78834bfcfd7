#!/usr/bin/env python3
"""Regenerate the checked-in fixture weight container used by the tests.

The fixture is a small random (untrained) model; it only needs to exercise
loading, inference and guided runs, not to predict anything useful.
"""

from pathlib import Path

import numpy as np

from gnls.gnn import random_model, save_weights

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "selector-tiny.gnnw"

def main():
    rng = np.random.default_rng(12345)
    model = random_model(rng, n_layers=3, hidden=16, n_mlp_layers=2)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    save_weights(model, OUT)
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")

if __name__ == "__main__":
    main()
