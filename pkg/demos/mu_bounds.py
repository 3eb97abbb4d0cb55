"""Bracket the structured singular value of a few random matrices.

For each block structure we print the spectral radius, the torus lower
bound, a certified bisection interval and the operator norm.  The four
numbers should come out in non-decreasing order.
"""
import numpy as np

from mudom import build_table, mu_bisection, mu_lower_torus, operator_norm, spectral_radius

rng = np.random.default_rng(7)

for blocks in ([3], [1, 1], [2, 1], [1, 1, 1]):
    t = build_table(blocks)
    A = (rng.standard_normal((t.n, t.n)) + 1j * rng.standard_normal((t.n, t.n))) / np.sqrt(t.n)
    rho = spectral_radius(A)
    lower = mu_lower_torus(t, A)
    iv = mu_bisection(t, A, tol=1e-3)
    norm = operator_norm(A)
    flag = "" if iv.exact else "  (widened near mu)"
    print(f"blocks {str(blocks):10s} rho={rho:.4f}  torus={lower:.4f}  "
          f"certified=[{iv.lo:.4f}, {iv.hi:.4f}]  ||A||={norm:.4f}{flag}")

# Scaling A by lam scales every bound by |lam|.
t = build_table([2, 1])
A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
lam = 0.3 - 0.4j
print("homogeneity:", mu_lower_torus(t, lam * A), abs(lam) * mu_lower_torus(t, A))
