"""The Motzkin-like benchmark: distances shrink as the degree bound grows.

The instance x1^2 x2^2 (x1^2 + x2^2 - 1) + 1/27 is nonnegative but not a
sum of squares, so its distance to the SOS cone is positive at every degree
bound; allowing higher-degree squares shrinks it fast.  The same table is
available from the command line as ``l1sos reproduce-table1``.
"""

import time

import numpy as np

from l1sos import best_l1_sos_approximation, motzkin_like, verify

f = motzkin_like()
print("f =", f, "\n")
print(f"{'d':>2}  {'lambda*':<42}  {'rho_d':<12} iters")

start = time.perf_counter()
for d in (3, 4, 5):
    res = best_l1_sos_approximation(f, d)
    lam = ", ".join(f"{v:.4e}" for v in res.lam)
    print(f"{d:>2}  ({lam})  {res.rho:.6e} {res.solver.iterations:>4}")
    assert verify(res, f, d).all_passed
elapsed = time.perf_counter() - start

print(f"\nall three solved and verified in {elapsed:.2f}s")
print("certificate sizes:", [len(best_l1_sos_approximation(f, d).certificate.squares) for d in (3, 4, 5)])
