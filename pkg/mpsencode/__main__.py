"""
CLI entry point. Run from project root: python -m mpsencode
"""
import sys
from .cli import main

if __name__ == "__main__":
    sys.exit(main())
