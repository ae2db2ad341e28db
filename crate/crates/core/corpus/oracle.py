"""Regenerates corpus.json by naive brute force, independently of the Rust code.

Usage: python3 oracle.py > corpus.json
"""

import json
from math import gcd, isqrt


def log_exact(s, c):
    """z >= 1 with c**z == s, or None."""
    z = 0
    while s > 1 and s % c == 0:
        s //= c
        z += 1
    return z if s == 1 and z >= 1 else None


def solve_exp(a, b, c, xmax, ymax):
    out = []
    for x in range(1, xmax + 1):
        for y in range(1, ymax + 1):
            z = log_exact(a**x + b**y, c)
            if z is not None:
                out.append((x, y, z))
    return sorted(out)


def solve_terai(b, c, mmax, nmax):
    out = []
    for m in range(1, mmax + 1):
        for n in range(1, nmax + 1):
            d = c**n - b**m
            if d > 0 and isqrt(d) ** 2 == d:
                out.append((isqrt(d), m, n))
    return sorted(out)


def solve_eisenstein(a, b, c, xmax, ymax):
    out = []
    for x in range(1, xmax + 1):
        for y in range(1, ymax + 1):
            ax, by = a**x, b**y
            z = log_exact(ax * ax + ax * by + by * by, c)
            if z is not None:
                out.append((x, y, z))
    return sorted(out)


def sols(ts):
    return [{"x": str(x), "y": str(y), "z": str(z)} for (x, y, z) in ts]


def fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def triple_of(fam):
    kind = fam["family"]
    if kind == "explicit":
        return int(fam["u"]), int(fam["v"]), int(fam["w"])
    if kind == "pq":
        p, q = int(fam["p"]), int(fam["q"])
        assert p > q >= 1 and gcd(p, q) == 1 and (p - q) % 2 == 1
        return p * p - q * q, 2 * p * q, p * p + q * q
    if kind == "jesmanowicz":
        n = int(fam["n"])
        return 2 * n + 1, 2 * n * (n + 1), 2 * n * (n + 1) + 1
    if kind == "lu":
        n = int(fam["n"])
        return 4 * n * n - 1, 4 * n, 4 * n * n + 1
    if kind == "fermat":
        n = int(fam["n"])
        f = 2 ** (2**n) + 1
        return f - 2, 2 ** (2 ** (n - 1) + 1), f
    raise ValueError(kind)


entries = []


def pythag(name, source, fam, k_from, k_to, bound, note=None):
    u, v, w = triple_of(fam)
    assert u * u + v * v == w * w
    sets = {tuple(solve_exp(k * u, k * v, k * w, bound, bound)) for k in range(k_from, k_to + 1)}
    assert len(sets) == 1, (name, sets)
    e = {
        "name": name,
        "source": source,
        "form": "pythag-exp",
        "family": fam,
        "k": {"from": str(k_from), "to": str(k_to)},
        "x_max": str(bound),
        "y_max": str(bound),
        "expected": sols(sets.pop()),
    }
    if note:
        e["note"] = note
    entries.append(e)


def general(name, source, form, bases, bound, found, note=None):
    e = {
        "name": name,
        "source": source,
        "form": form,
        "bases": [str(b) for b in bases],
        "x_max": str(bound),
        "y_max": str(bound),
        "expected": sols(found),
    }
    if note:
        e["note"] = note
    entries.append(e)


def explicit(u, v, w):
    return {"family": "explicit", "u": str(u), "v": str(v), "w": str(w)}


pythag("sierpinski-3-4-5", "Sierpinski 1956", explicit(3, 4, 5), 1, 1, 30)
for n in range(2, 6):
    pythag(f"jesmanowicz-n{n}", "Jesmanowicz 1956", {"family": "jesmanowicz", "n": str(n)}, 1, 1, 30)
for t in [(3, 4, 5), (5, 12, 13), (7, 24, 25), (9, 40, 41), (11, 60, 61)]:
    pythag(f"deng-cohen-{t[0]}-{t[1]}-{t[2]}", "Deng and Cohen 1998", explicit(*t), 1, 20, 25)
for n in range(1, 9):
    pythag(f"lu-n{n}", "Lu 1959; scaled forms", {"family": "lu", "n": str(n)}, 1, 10, 20)
pythag("twenty-99-101", "(20k)^x + (99k)^y = (101k)^z", explicit(20, 99, 101), 1, 50, 20)
pythag("pq-5-2", "primitive triple from (p, q) = (5, 2)", {"family": "pq", "p": "5", "q": "2"}, 1, 5, 20)
for n in (2, 3):
    pythag(f"fermat-n{n}", "Fermat-number triples", {"family": "fermat", "n": str(n)}, 1, 1, 20)

general("three-two-five", "two-solution equation", "general-exp", (3, 2, 5), 30, solve_exp(3, 2, 5, 30, 30))
general("seven-two-three", "two-solution equation", "general-exp", (7, 2, 3), 30, solve_exp(7, 2, 3, 30, 30))
for n in range(3, 7):
    a, c = 2**n - 1, 2**n + 1
    found = solve_exp(a, 2, c, 30, 30)
    assert found == [(1, 1, 1), (2, n + 2, 2)], found
    general(f"mersenne-fermat-n{n}", "(2^n - 1)^x + 2^y = (2^n + 1)^z", "general-exp", (a, 2, c), 30, found)
general("eighty-nine", "b = 89 exception", "general-exp", (89, 2, 91), 30, solve_exp(89, 2, 91, 30, 30))
for n in range(2, 11):
    general(
        f"he-togbe-n{n}",
        "He and Togbe: n^x + (n+1)^y = (n+2)^z",
        "general-exp",
        (n, n + 1, n + 2),
        25,
        solve_exp(n, n + 1, n + 2, 25, 25),
        note="n = 1 has base 1 and the parametric solutions (t, 1, 1), (t, 3, 2); it is not searched"
        if n == 2
        else None,
    )
for n in range(3, 8):
    a, b, c = fib(n), fib(2 * n + 2), fib(n + 2)
    assert a * a + b == c * c
    found = solve_exp(a, b, c, 20, 20)
    assert (2, 1, 2) in found
    general(f"fibonacci-n{n}", "F_n^2 + F_(2n+2) = F_(n+2)^2", "general-exp", (a, b, c), 20, found)
for b, c in [(3, 5), (5, 13), (7, 25), (9, 41)]:
    general(
        f"terai-{b}-{c}",
        "x^2 + b^m = c^n",
        "terai",
        (b, c),
        20,
        solve_terai(b, c, 20, 20),
        note="solutions are (x, m, n)",
    )
for a, b, c in [(3, 5, 7), (5, 3, 7), (7, 8, 13)]:
    found = solve_eisenstein(a, b, c, 20, 20)
    general(f"eisenstein-{a}-{b}-{c}", "a^(2x) + a^x b^y + b^(2y) = c^z", "eisenstein", (a, b, c), 20, found)

print(json.dumps(entries, indent=2, sort_keys=True))
