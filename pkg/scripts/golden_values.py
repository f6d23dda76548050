"""High-precision reference values for the frozen constants in the test suite.

Every closed-form number asserted in tests/ was produced by this script, not by
the library under test.  Each block below re-derives one quantity from scratch
with mpmath at 50 significant digits, so a transcription error in the library
cannot silently propagate into the expected values.

Run:  python scripts/golden_values.py
"""

from mpmath import mp, mpf, sqrt, log, e

mp.dps = 50


def section(title):
    print()
    print(f"# {title}")


def show(name, value, digits=17):
    print(f"{name} = {mp.nstr(value, digits)}")


# ---------------------------------------------------------------------------
# Confidence indices
# ---------------------------------------------------------------------------

def ch_index(var_biased, pulls, delta):
    var_biased, pulls, delta = mpf(var_biased), mpf(pulls), mpf(delta)
    return (var_biased + 3 * sqrt(log(1 / delta) / (2 * pulls))) / pulls


def b_index(sd_unbiased, pulls, delta, a):
    sd, t, a = mpf(sd_unbiased), mpf(pulls), mpf(a)
    big_l = log(2 / mpf(delta))
    return (sd**2 + 4 * a * sd * sqrt(big_l / t) + 4 * a**2 * big_l / t) / t


section("ch_index")
show("ch_index(var=0.25, pulls=2, delta=0.01)", ch_index("0.25", 2, "0.01"))
show("ch_index(var=0,    pulls=2, delta=0.01)", ch_index(0, 2, "0.01"))
# larger-pulls / larger-delta companions used in monotonicity spot checks
show("ch_index(var=0.25, pulls=3, delta=0.01)", ch_index("0.25", 3, "0.01"))
show("ch_index(var=0.25, pulls=2, delta=0.1)", ch_index("0.25", 2, "0.1"))

section("b_index")
show("b_index(sd=1, pulls=4, delta=0.1, a=2)", b_index(1, 4, "0.1", 2))
show("b_index(sd=0, pulls=4, delta=0.1, a=2)", b_index(0, 4, "0.1", 2))
show("4*a^2*log(2/delta)/T^2 at same point", 4 * mpf(4) * log(20) / 16)


# ---------------------------------------------------------------------------
# Exploration constant a(c1, c2, delta, n)
# ---------------------------------------------------------------------------

def compute_a(c1, c2, delta, n, form):
    c1, c2, delta, n = mpf(c1), mpf(c2), mpf(delta), mpf(n)
    if form == "appendix":
        first = 2 * sqrt(c1 * log(c2 / delta))
    elif form == "main":
        first = sqrt(2 * c1 * log(c2 / delta))
    else:
        raise ValueError(form)
    second = (
        sqrt(c1 * delta * (1 + c2 + log(c2 / delta)))
        / ((1 - delta) * sqrt(2 * log(2 / delta)))
        * sqrt(n)
    )
    return first + second


section("compute_a")
show("a(c1=1, c2=1, delta=0.01, n=100) appendix", compute_a(1, 1, "0.01", 100, "appendix"))
show("a(c1=1, c2=1, delta=0.01, n=100) main", compute_a(1, 1, "0.01", 100, "main"))
show("a(c1=10, c2=1, delta=1000**-3.5, n=1000) appendix",
     compute_a(10, 1, mpf(1000) ** mpf("-3.5"), 1000, "appendix"))
show("a(c1=2, c2=1, delta=1000**-3.5, n=1000) appendix",
     compute_a(2, 1, mpf(1000) ** mpf("-3.5"), 1000, "appendix"))


# ---------------------------------------------------------------------------
# Deviation / regret bounds
# ---------------------------------------------------------------------------

def ch_pull_deviation_bound(big_k, big_sigma, lam_min, n, delta):
    big_sigma, lam_min, n, delta = mpf(big_sigma), mpf(lam_min), mpf(n), mpf(delta)
    return 12 * sqrt(n * log(1 / delta)) / (big_sigma * lam_min ** mpf("1.5")) + 4 * big_k


def ch_regret_bound(n, lam_min, big_sigma):
    n, lam, s = mpf(n), mpf(lam_min), mpf(big_sigma)
    first = 39 * sqrt(log(n)) / (n ** mpf("1.5") * lam ** mpf("2.5"))
    second = (mpf("2.9e3") / n**2) * log(n) ** mpf("1.5") * lam ** mpf("-5.5") * (1 + s ** mpf("-2.5"))
    return first, second, first + second


def bas_pull_bounds(big_k, big_sigma, lam_k, n, delta, a):
    big_k_m = mpf(big_k)
    big_sigma, lam_k, n, delta, a = mpf(big_sigma), mpf(lam_k), mpf(n), mpf(delta), mpf(a)
    big_l = log(2 / delta)
    c_delta = a * sqrt(3 * big_l) / (sqrt(big_k_m) * (sqrt(big_sigma) + 3 * a * sqrt(big_l)))
    bracket = (
        (16 * a * sqrt(big_l) / big_sigma)
        * (sqrt(big_sigma) + 2 * a * sqrt(big_l) / c_delta)
        * sqrt(n)
        + 64 * sqrt(2 * big_k_m) * a**2 * big_l / (big_sigma * sqrt(c_delta)) * n ** mpf("0.25")
        + 2
    )
    return big_k_m * lam_k * bracket, big_k_m * bracket


def bas_regret_bound(n, big_k, lam_min, c1, c2):
    n, lam = mpf(n), mpf(lam_min)
    return 76400 * mpf(c1) * (mpf(c2) + 1) * big_k**2 * log(n) ** 2 / (lam * n ** mpf("1.5"))


def gaussian_regret_bound(n, big_k, sigma_bar):
    n = mpf(n)
    return mpf("105e3") * mpf(sigma_bar) * big_k**2 * log(n) ** 2 / n ** mpf("1.5")


section("ch_pull_deviation_bound")
d = mpf(1000) ** mpf("-2.5")
show("bound(K=2, Sigma=5, lam_min=0.2, n=1000, delta=n^-2.5)",
     ch_pull_deviation_bound(2, 5, "0.2", 1000, d))

section("ch_regret_bound")
f, s, tot = ch_regret_bound(1000, "0.2", 5)
show("first term  (n=1000, lam=0.2, Sigma=5)", f)
show("second term (n=1000, lam=0.2, Sigma=5)", s)
show("total       (n=1000, lam=0.2, Sigma=5)", tot)
# the same second term with n^3 in the denominator instead of n^2, for reference
s_cubed = s / 1000
show("second term if 1/n^3 were used", s_cubed)
show("total if 1/n^3 were used", f + s_cubed)

section("bas_pull_bounds")
a_ref = compute_a(10, 1, mpf(1000) ** mpf("-3.5"), 1000, "appendix")
lo, hi = bas_pull_bounds(2, 5, "0.8", 1000, mpf(1000) ** mpf("-3.5"), a_ref)
show("a used", a_ref)
show("lower_dev(K=2, Sigma=5, lam_k=0.8, n=1000)", lo)
show("upper_dev(K=2, Sigma=5, lam_k=0.8, n=1000)", hi)
show("lower_dev/(K*lam_k)", lo / (2 * mpf("0.8")))
show("upper_dev/K", hi / 2)

section("bas_regret_bound")
show("bound(n=1000, K=2, lam_min=0.2, c1=2, c2=1)", bas_regret_bound(1000, 2, "0.2", 2, 1))
show("bound(n=1000, K=2, lam_min=0.2, c1=1, c2=1)", bas_regret_bound(1000, 2, "0.2", 1, 1))

section("gaussian_regret_bound")
show("bound(n=1000, K=2, sigma_bar=5)", gaussian_regret_bound(1000, 2, 5))
show("bound(n=4000, K=2, sigma_bar=5)", gaussian_regret_bound(4000, 2, 5))
show("exact ratio bound(n)/bound(4n) at n=1000",
     gaussian_regret_bound(1000, 2, 5) / gaussian_regret_bound(4000, 2, 5))
show("8 * (log(1000)/log(4000))^2", 8 * (log(1000) / log(4000)) ** 2)


# ---------------------------------------------------------------------------
# Static allocations (largest-remainder rounding)
# ---------------------------------------------------------------------------

def largest_remainder(variances, n):
    variances = [mpf(v) for v in variances]
    total = sum(variances)
    targets = [v * n / total for v in variances]
    floors = [int(t) for t in targets]
    leftover = n - sum(floors)
    order = sorted(range(len(variances)), key=lambda k: (-(targets[k] - floors[k]), k))
    out = list(floors)
    for k in order[:leftover]:
        out[k] += 1
    return out


section("largest_remainder allocations")
print("variances (4,1), n=1000 ->", largest_remainder([4, 1], 1000))
print("variances (1,1,1), n=10 ->", largest_remainder([1, 1, 1], 10))
print("variances (1,1,1), n=11 ->", largest_remainder([1, 1, 1], 11))
print("variances (4,1), n=7    ->", largest_remainder([4, 1], 7))
print("variances (2,1,1), n=9  ->", largest_remainder([2, 1, 1], 9))


# ---------------------------------------------------------------------------
# Small worked examples for the running-variance recursion
# ---------------------------------------------------------------------------

section("variance recursion on (0, 1, 0)")
xs = [mpf(0), mpf(1), mpf(0)]
m2 = sum(xs[:2]) / 2
s2_2 = sum((x - m2) ** 2 for x in xs[:2])  # unbiased, t=2
show("unbiased var of (0,1)", s2_2)
rhs = (mpf(1) / 2) * s2_2 + (mpf(1) / 3) * (xs[2] - m2) ** 2
show("recursion rhs for t=2 -> 3", rhs)
m3 = sum(xs) / 3
s2_3 = sum((x - m3) ** 2 for x in xs) / 2
show("unbiased var of (0,1,0)", s2_3)

section("tail comparison: two-sided gaussian vs exp(-eps^2/(2 sigma^2))")
from mpmath import erfc
for eps in ("0.5", "1", "2"):
    epsf = mpf(eps)
    p = erfc(epsf / sqrt(2))  # P(|Z| >= eps), Z standard normal
    show(f"P(|Z|>={eps})", p)
    show(f"exp(-{eps}^2/2)", e ** (-(epsf**2) / 2))
