"""Reference evaluation of the group-testing and permutation sample bounds.

Evaluates the closed forms with 50-digit arithmetic, independently of the
Rust crate, and prints the integer sample counts that the test suite freezes.
Also reports the distance of each real-valued bound to the nearest integer so
that ties under f64 rounding would be visible.
"""
from mpmath import mp, mpf, log, sqrt, ceil, nint

mp.dps = 50


def h(u):
    return (1 + u) * log(1 + u) - u


def original(n, eps, delta):
    z = 2 * sum(mpf(1) / k for k in range(1, n))
    q = {k: (mpf(1) / k + mpf(1) / (n - k)) / z for k in range(1, n)}
    qtot = mpf(n - 2) / n * q[1] + sum(
        q[k] * (1 + mpf(2 * k * (k - n)) / (n * (n - 1))) for k in range(2, n)
    )
    arg = eps / (2 * z * sqrt(n) * (1 - qtot))
    return log(mpf(n * (n - 1)) / delta) / ((1 - qtot) * h(arg))


def improved(n, eps, delta):
    z = 2 * sum(mpf(1) / k for k in range(1, n + 1))
    q = {k: (mpf(1) / k + mpf(1) / (n + 1 - k)) / z for k in range(1, n + 1)}
    qtot = mpf(n - 1) / (n + 1) * q[1] + sum(
        q[k] * (1 + mpf(2 * k * (k - n - 1)) / (n * (n + 1))) for k in range(2, n + 1)
    )
    arg = eps / (z * sqrt(n + 1) * (1 - qtot))
    return log(mpf(n) / delta) / ((1 - qtot) * h(arg))


def permutations(n, eps, delta):
    return (2 * mpf(n) / eps**2) * log(2 * mpf(n) / delta)


if __name__ == "__main__":
    print("n,epsilon,delta,T_original,T_improved,min_gap_to_integer")
    for n in (5, 10, 50, 100):
        for eps in ("0.1", "0.5"):
            for delta in ("0.01", "0.1"):
                e, d = mpf(eps), mpf(delta)
                a, b = original(n, e, d), improved(n, e, d)
                gap = min(abs(a - nint(a)), abs(b - nint(b)))
                print(f"{n},{eps},{delta},{int(ceil(a))},{int(ceil(b))},{mp.nstr(gap, 5)}")
    print()
    print("n,epsilon,delta,permutations,min_gap_to_integer")
    for n, eps, delta in ((10, "0.5", "0.1"), (8, "0.5", "0.1"), (50, "0.1", "0.05"), (100, "0.1", "0.05")):
        m = permutations(n, mpf(eps), mpf(delta))
        print(f"{n},{eps},{delta},{int(ceil(m))},{mp.nstr(abs(m - nint(m)), 5)}")
