"""Average decoder search cost per strategy on a skewed source."""

import numpy as np

from arcode.binary import build_bisection_tree, build_optimal_tree, expected_tests, sequential_tests
from arcode.model import StaticDistribution
from arcode.search import STRATEGIES, probe_counter

p = ["0.033", "0.066", "0.083", "0.124", "0.157", "0.537"]
dist = StaticDistribution(p)
print("expected comparisons")
print(f"  sequential {sequential_tests(dist):.3f}")
print(f"  bisection  {expected_tests(build_bisection_tree(6), dist):.3f}")
print(f"  optimal    {expected_tests(build_optimal_tree(dist.p), dist):.3f}")

probs = np.array([float(x) for x in dist.p])
symbols = np.random.default_rng(0).choice(6, 50_000, p=probs).tolist()
scaled = dist.scaled(4, 256)
print("measured probes per symbol")
for name in STRATEGIES:
    print(f"  {name:<10} {probe_counter(name, scaled, symbols):.3f}")
