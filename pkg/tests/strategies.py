"""Hypothesis strategy: small random frames from the harness generator."""

from hypothesis import strategies as st

from caudit.harness import GenConfig, generate_frame

configs = st.builds(
    GenConfig,
    seed=st.integers(0, 2**64 - 1),
    domain_size_range=st.sampled_from([(2, 2), (2, 3), (2, 4)]),
    num_other_inputs=st.sampled_from([(0, 0), (0, 1), (1, 2)]),
    correlate_x_a=st.booleans(),
    randomized=st.booleans(),
    fresh_r=st.booleans(),
    max_denominator=st.integers(1, 12),
)

frames = configs.map(generate_frame)
