#!/usr/bin/env python3
"""Run the full analytic-vs-oracle regression at the acceptance settings."""

import subprocess
import sys

if __name__ == "__main__":
    sys.exit(
        subprocess.run(
            ["pqfi", "oracle-check", "--points", "200", "--seed", "42", *sys.argv[1:]]
        ).returncode
    )
