"""Coevolutionary bat algorithm and MFEA baseline for multitask TSP."""
