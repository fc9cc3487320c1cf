#!/usr/bin/env python3
"""
gammanoise package main entry point.

This module allows the package to be executed as a module with python -m gammanoise.
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
