#!/usr/bin/env python3
"""Regenerate the bundled demo inputs under demo/."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from borefield.demo import write_demo_inputs

if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "demo"
    )
    for path in write_demo_inputs(target):
        print(path)
