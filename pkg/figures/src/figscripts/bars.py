"""Grouped bar chart of option fractions (header: option,fraction[,group])."""
from ._cli import run_kind


def main(argv=None) -> int:
    return run_kind("bars", __doc__, argv)


if __name__ == "__main__":
    raise SystemExit(main())
