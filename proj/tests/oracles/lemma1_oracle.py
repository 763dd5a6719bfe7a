# Independent evaluation of the lifted-set comparison for k=3, s=2, theta=0.4,
# base [1..floor(P)], window primes in [max(2, ceil(Z/2)), floor(Z)], Z = P^theta.
from collections import Counter
from fractions import Fraction
from itertools import product
import math
from sympy import primerange


def S(X, s, k):
    c = Counter(sum(x**k for x in t) for t in product(X, repeat=s))
    return sum(v * v for v in c.values())


for P in (8, 12, 16):
    Z = P ** 0.4
    lo, hi = max(2, math.ceil(Z / 2)), math.floor(Z)
    primes = list(primerange(lo, hi + 1))
    base = list(range(1, P + 1))
    lifted = sorted({b * p for b in base for p in primes})
    z = len(primes)
    lhs = S(lifted, 2, 3)
    rhs = z**2 * S(base, 2, 3) + z**4 * P * S(base, 1, 3)
    print(P, primes, len(lifted), lhs, rhs, repr(float(Fraction(lhs, rhs))))
