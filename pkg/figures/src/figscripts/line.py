"""Line chart of utility over time (iteration,mean_utility[,smoothed])
or month-pair correlations (month_a,month_b,correlation)."""
from ._cli import run_kind


def main(argv=None) -> int:
    return run_kind("line", __doc__, argv, with_log_y=True)


if __name__ == "__main__":
    raise SystemExit(main())
