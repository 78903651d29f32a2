"""Weighted independent transversals with certified weight guarantees."""
