"""Audit one sequential coupled run, step by step.

One uniform per step: the upper configuration opens its edge below the
target's exact conditional probability, the lower below the fixed q.  The
upper trace steers the exploration; the lower marginal is exactly product
Bernoulli(q).  With q at the conditional floor the pair is ordered on every
seed; with q inflated, violations are reported rather than hidden.
"""

import json

from percolab import (
    CLUSTER_FIRST,
    build_ball,
    couple_sequential,
    exact_magnetization,
    LatticeSpec,
    make_conditional_oracle,
)
from percolab.coupling import pair_to_json

ball = build_ball(LatticeSpec.hypercubic(1), 1)
p, h = 0.5, 0.5
m = exact_magnetization(ball, p, h)
q = p * (1 - m)
oracle = make_conditional_oracle(ball, CLUSTER_FIRST, p, h)

pair = couple_sequential(ball, CLUSTER_FIRST, q, oracle, rng_seed=7)
print(f"p={p}, h={h}, magnetization={m:.4f}, q=p(1-m)={q:.4f}\n")
print(f"{'step':>4} {'edge':>4} {'uniform':>9} {'conditional':>11} "
      f"{'upper':>5} {'lower':>5}")
for k, (e, pr) in enumerate(zip(pair.trace.order, pair.step_probs)):
    u = pair.uniforms[k]
    print(f"{k:4d} {e:4d} {u:9.4f} {pr:11.4f} "
          f"{int(pair.upper[e]):5d} {int(pair.lower[e]):5d}")
print(f"\nordered: {pair.ordered}, violations: {len(pair.violations)}")

print("\nfull JSON audit record:")
print(json.dumps(pair_to_json(pair), indent=2, sort_keys=True))

# inflate q and count order violations across seeds: the probe reports
# exactly where the coupling hypothesis breaks
bad_q = 0.95
broken = sum(
    len(couple_sequential(ball, CLUSTER_FIRST, bad_q, oracle, seed).violations)
    for seed in range(2000)
)
print(f"\nwith q = {bad_q}: {broken} violations across 2000 seeds")
