#!/usr/bin/env python3
"""Independent construction of the multi-level product sets for k=3, Delta=1."""
import math
from sympy import primerange

k, delta, P = 3, 1.0, 1e4
fixed = 1 / (k + delta)
thetas = [fixed + (1 / k - fixed) * ((k - delta) / (2 * k)) ** (k - j) for j in range(1, k + 1)]
thetas[-1] = 1 / k
Z = [P ** t for t in thetas]
windows = [list(primerange(max(2, math.ceil(z / 2)), math.floor(z) + 1)) for z in Z]
Pk = P
for z in Z:
    Pk /= z
level = set(range(1, math.floor(Pk) + 1))
sizes = [len(level)]
for w in reversed(windows):
    level = {x * p for x in level for p in w if x % p}
    sizes.append(len(level))
print("thetas", thetas)
print("windows", [(math.ceil(z / 2), math.floor(z), w) for z, w in zip(Z, windows)])
print("P_k", Pk, "sizes level k..0", sizes)
print("first elements", sorted(level)[:10], "max", max(level))
