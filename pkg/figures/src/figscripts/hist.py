"""Histogram from pre-binned counts (bin_left,bin_right,count) or
retention buckets (bucket_low,bucket_high,fraction_of_users)."""
from ._cli import run_kind


def main(argv=None) -> int:
    return run_kind("hist", __doc__, argv, with_log_y=True)


if __name__ == "__main__":
    raise SystemExit(main())
