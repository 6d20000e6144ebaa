"""Exact causal / associative privacy and nondiscrimination checking for finite structural causal models."""
