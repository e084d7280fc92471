"""
Repository-root entry point.
Equivalent to the installed `ctc-detector` script: python app.py <command> ...
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
