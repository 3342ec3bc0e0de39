#!/usr/bin/env python3

from advbs.cli import cli

if __name__ == "__main__":
    cli()
