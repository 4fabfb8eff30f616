#!/usr/bin/env python3
"""
AP-Space Conformal Verifier
Main command-line entry point
"""

import os
import sys

# Add src directory to Python path
src_path = os.path.join(os.path.dirname(__file__), 'src')
if src_path not in sys.path:
    sys.path.insert(0, src_path)

from cli.commands import main


if __name__ == "__main__":
    sys.exit(main())
