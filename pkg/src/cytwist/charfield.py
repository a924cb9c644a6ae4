"""Prime-field utilities and the quadratic character of Q(sqrt(d))."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of |n| by trial division."""
    n = abs(n)
    out = []
    q = 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def is_squarefree(n: int) -> bool:
    if n == 0:
        raise ValueError("squarefreeness of 0 is undefined")
    n = abs(n)
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        if n % q == 0:
            n //= q
        q += 1 if q == 2 else 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __int__(self):
        return self.p


def as_prime(p: int | PrimeModulus) -> int:
    """Accept either a bare int or a PrimeModulus; validate and return the int."""
    if isinstance(p, PrimeModulus):
        return p.p
    return PrimeModulus(int(p)).p


def fundamental_discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for arbitrary integers a, n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol by reciprocity
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class QuadraticCharacterSpec:
    """The character chi of K = Q(sqrt(d)), realized as n -> (D/n)."""

    d: int
    D: int = field(init=False)

    def __post_init__(self):
        if self.d in (0, 1):
            raise ValueError(f"d = {self.d} does not define a quadratic field")
        if not is_squarefree(self.d):
            raise ValueError(f"d = {self.d} is not squarefree")
        object.__setattr__(self, "D", fundamental_discriminant(self.d))

    def __call__(self, n: int) -> int:
        return chi_eval(self, n)

    @property
    def conductor(self) -> int:
        return abs(self.D)


def chi_eval(spec: QuadraticCharacterSpec, n: int) -> int:
    return kronecker(spec.D, n)


def legendre_oracle(a: int, p: int | PrimeModulus) -> int:
    """Euler's criterion; deliberately independent of :func:`kronecker`."""
    p = as_prime(p)
    if p == 2:
        raise ValueError("Euler's criterion needs an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def chi_p(a: int, p: int) -> int:
    """Quadratic residue character of F_p (p odd), with chi_p(0) = 0."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def good_primes(pmax: int, *avoid: int, pmin: int = 2) -> list[int]:
    bad = set()
    for n in avoid:
        if n:
            bad.update(prime_factors(n))
    return [p for p in primes_up_to(pmax) if p >= pmin and p not in bad]


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
