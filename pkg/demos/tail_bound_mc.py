"""Monte Carlo check of the ghost-tilted tail inequality on the square lattice.

Estimates the magnetization m, sets q = p(1 - m) adversarially from the
interval's low end, then compares the tail at q against
psi_n(p) e^{-h n} / (1 - m) with 0.999-level intervals.  PASS only when the
inflated left side clears the bound; straddles are MARGINAL, never PASS.
"""

from percolab import LatticeSpec, tail_bound_verdict

spec = LatticeSpec.hypercubic(2)
p, h = 0.45, 0.1
report = tail_bound_verdict(spec, p, h, n_list=range(10, 61, 10),
                            samples=20_000, rng_seed=101)

mag = report.magnetization
print(f"p={p}, h={h}, samples={report.samples}")
print(f"magnetization in [{mag.lower.lo:.4f}, {mag.upper.hi:.4f}] "
      f"(truncated fraction {mag.lower.truncated_fraction:.4f})")
print(f"q = p(1 - m_lo) = {report.q:.4f}   q' = p(1 - m_hi) = {report.q_alt:.4f}\n")

print(f"{'n':>4} {'tail(q)':>10} {'tail hi':>10} {'bound':>10} {'verdict':>8}")
for row in report.rows:
    print(f"{row['n']:4d} {row['lhs']:10.5f} {row['lhs_hi']:10.5f} "
          f"{row['rhs']:10.5f} {row['verdict']:>8}")
print(f"\nany FAIL: {report.failed}")
