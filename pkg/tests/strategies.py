import random

from hypothesis import strategies as st

from symplinv.poly import random_poly

seeds = st.integers(0, 2 ** 32 - 1)


def rpoly(m, max_deg=3, density=0.4, min_deg=0):
    return seeds.map(lambda s: random_poly(m, max_deg, random.Random(s), density, min_deg=min_deg))
