"""Exact stochastic-domination machinery on a small ball.

For each (p, h): the worst conditional pivotal probability eps* along the
cluster-first exploration, the finite-ball magnetization bound that caps it,
the exact floor of the conditional open probabilities, and a Strassen
certificate that product Bernoulli(p(1-eps*)) is dominated by the law
conditioned on the origin cluster avoiding every green vertex.
"""

from percolab import (
    CLUSTER_FIRST,
    build_ball,
    conditional_measure,
    domination_margin,
    LatticeSpec,
    magnetization_bound,
    make_conditional_oracle,
    max_conditional_pivotal,
    product_measure,
    strassen_dominates,
    verify_certificate,
)
from percolab.exact import certificate_to_json

ball = build_ball(LatticeSpec.hypercubic(1), 2)
print(f"ball: {ball}\n")
print(f"{'p':>5} {'h':>5} {'eps*':>8} {'m_hat':>8} {'q':>8} "
      f"{'open floor':>10} {'dominates':>9}")
for p in (0.2, 0.5, 0.8):
    for h in (0.1, 0.5, 1.0):
        eps = max_conditional_pivotal(ball, CLUSTER_FIRST, p, h)
        m_hat = magnetization_bound(ball, p, h)
        q = p * (1 - eps)
        cond = conditional_measure(ball, p, h)
        oracle = make_conditional_oracle(ball, CLUSTER_FIRST, p, h)
        floor = domination_margin(ball, CLUSTER_FIRST, oracle, cond)
        cert = strassen_dominates(product_measure(ball, q), cond)
        assert verify_certificate(cert, product_measure(ball, q), cond)
        print(f"{p:5.2f} {h:5.2f} {eps:8.4f} {m_hat:8.4f} {q:8.4f} "
              f"{floor:10.4f} {str(cert.dominates):>9}")

# push q past the conditional floor and the certificate names a witness:
# an increasing event the product law hits more often than the target
p, h = 0.5, 0.5
cond = conditional_measure(ball, p, h)
bad = strassen_dominates(product_measure(ball, 0.9), cond)
print(f"\nq = 0.9 against (p, h) = ({p}, {h}): dominates={bad.dominates}")
print("failure witness:", certificate_to_json(bad))
