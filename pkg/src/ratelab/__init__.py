"""Seeded recommender feedback-loop simulation and rating-data analysis toolkit."""
from __future__ import annotations

__version__ = "0.1.0"
