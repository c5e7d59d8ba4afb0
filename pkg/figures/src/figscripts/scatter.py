"""Scatter of per-item means: personalized vs random
(mean_random,mean_personalized) or exposure vs mean
(frac_personalized,mean_rating)."""
from ._cli import run_kind


def main(argv=None) -> int:
    return run_kind("scatter", __doc__, argv)


if __name__ == "__main__":
    raise SystemExit(main())
