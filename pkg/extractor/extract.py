#!/usr/bin/env python3
"""Command-line entry point; see extractor.runner for the implementation."""

import sys

from extractor.runner import main

if __name__ == "__main__":
    sys.exit(main())
