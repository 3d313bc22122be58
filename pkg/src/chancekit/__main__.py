"""Module entry point so `python -m chancekit` matches the console script."""

from chancekit.cli import console_entry

if __name__ == "__main__":
    console_entry()
