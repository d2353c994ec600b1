import math

import numpy as np
import pytest

import siegellab.partition as partition
from siegellab.character import build_character_table
from siegellab.errors import BudgetExceededError, RangeError
from siegellab.partition import (
    JESplitReport,
    PartitionParams,
    ReciprocalGcdRecord,
    TSumReport,
    count_smooth,
    j_e_split_sums,
    reciprocal_gcd_sum,
    t_sums,
    triple_total_pair_route,
)
from siegellab.sieve import build_fun_tables, build_spf, sign_class_split

from oracles import divisors, trial_factor

pytestmark = pytest.mark.filterwarnings("ignore:alpha exceeds epsilon")

X = 10_000


@pytest.fixture(scope="module")
def chi3():
    return build_character_table(-3, tail_cutoff=10_000)


@pytest.fixture(scope="module")
def tables3(chi3):
    return build_fun_tables(X, chi3)


@pytest.fixture(scope="module")
def params():
    return PartitionParams(theta=0.5, alpha=0.01)


def test_params_validation():
    with pytest.raises(RangeError):
        PartitionParams(theta=0.0, alpha=0.01)
    with pytest.raises(RangeError):
        PartitionParams(theta=0.5, alpha=0.2)
    with pytest.raises(RangeError):
        PartitionParams(theta=0.5, alpha=0.01, epsilon=0.5)
    with pytest.raises(RangeError):
        PartitionParams(theta=0.5, alpha=0.01, beta=1.0)
    with pytest.warns(UserWarning):
        PartitionParams(theta=0.5, alpha=0.01)
    assert not PartitionParams(theta=0.5, alpha=0.01).paper_constraints_ok()
    assert PartitionParams(theta=0.5, alpha=1e-7).paper_constraints_ok()


def brute_t_sums(x, q, a, tables, theta, alpha):
    """Independent triple-loop oracle for the bucket sums."""
    dstar = tables.disc.dstar
    thr_a = x ** (1 - theta - alpha)
    thr_b = x ** (2 * theta - 1 + 2 * alpha)
    lam = tables.lambda_
    big = tables.biglambda
    buckets = [0.0, 0.0, 0.0, 0.0, 0.0]
    for d in range(dstar + 1, x + 1):
        for m1 in range(1, x // d + 1):
            for m2 in range(1, x // (d * m1) + 1):
                prod = d * m1 * m2
                if 2 * prod < x or prod % q != a % q:
                    continue
                w = float(lam[d]) * float(big[m1]) * float(lam[m2])
                if w == 0.0:
                    continue
                if m2 <= dstar:
                    buckets[0] += w
                elif d < thr_a:
                    buckets[1] += w
                elif m2 < thr_a:
                    buckets[2] += w
                elif m1 <= thr_b:
                    buckets[3] += w
                else:
                    buckets[4] += w
    return buckets


@pytest.mark.parametrize("q,a,theta", [(7, 3, 0.5), (13, 5, 0.45), (4, 3, 0.6)])
def test_t_sums_against_brute_force(chi3, tables3, q, a, theta):
    x = 600
    p = PartitionParams(theta=theta, alpha=0.01)
    rep = t_sums(x, q, a, chi3, p, tables3)
    brute = brute_t_sums(x, q, a, tables3, theta, 0.01)
    got = [rep.t1, rep.t2, rep.t3, rep.t4, rep.unclassified]
    for lhs, rhs in zip(got, brute):
        assert abs(lhs - rhs) < 1e-9, (got, brute)


@pytest.mark.parametrize("delta", [-4, 5])
def test_t_sums_brute_force_other_characters(delta):
    chi = build_character_table(delta, tail_cutoff=1000)
    tables = build_fun_tables(700, chi)
    p = PartitionParams(theta=0.5, alpha=0.02)
    rep = t_sums(700, 11, 4, chi, p, tables)
    brute = brute_t_sums(700, 11, 4, tables, 0.5, 0.02)
    got = [rep.t1, rep.t2, rep.t3, rep.t4, rep.unclassified]
    for lhs, rhs in zip(got, brute):
        assert abs(lhs - rhs) < 1e-9, (got, brute)


def test_t_sums_trivial_when_dstar_dominates(params):
    chi = build_character_table(-7, tail_cutoff=1000)  # D* = 49
    tables = build_fun_tables(60, chi)
    rep = t_sums(40, 7, 3, chi, params, tables)
    assert rep.bucket_total() == 0.0
    assert rep.psi_lower_star_abs == 0.0
    assert rep.inequality_holds


def test_t_sums_nonnegative_and_inequality(chi3, tables3, params):
    rep = t_sums(X, 97, 5, chi3, params, tables3)
    for v in (rep.t1, rep.t2, rep.t3, rep.t4, rep.unclassified):
        assert v >= 0.0
    assert rep.inequality_holds
    assert rep.psi_lower_star_abs <= rep.t1 + rep.t2 + rep.t3 + rep.t4 + 1e-6


def test_t_sums_classification_is_partition(chi3, tables3, params):
    # bucket mass reassembles the pair-route total over the same window
    rep = t_sums(X, 97, 5, chi3, params, tables3)
    pair_route = triple_total_pair_route(X, 97, 5, tables3)
    assert abs(rep.bucket_total() - pair_route) < 1e-6
    assert rep.unclassified == 0.0


def test_t_sums_psi_lower_star_brute(chi3, tables3, params):
    x, q, a = 600, 7, 3
    rep = t_sums(x, q, a, chi3, params, tables3)
    acc = 0.0
    for d in range(10, x + 1):
        for m in range(1, x // d + 1):
            if 2 * d * m >= x and (d * m) % q == a:
                acc += float(tables3.nu[d]) * float(tables3.lambda_prime[m])
    assert abs(rep.psi_lower_star_abs - abs(acc)) < 1e-9


def test_t_sums_errors(chi3, tables3, params, monkeypatch):
    with pytest.raises(RangeError):
        t_sums(X, 97, 97, chi3, params, tables3)
    with pytest.raises(RangeError):
        t_sums(X + 1, 97, 5, chi3, params, tables3)
    monkeypatch.setattr(partition, "TRIPLE_OP_BUDGET", 10)
    with pytest.raises(BudgetExceededError):
        t_sums(X, 97, 5, chi3, params, tables3)


def brute_je(x, q, a, tables, chi, sieve, alpha):
    dstar = tables.disc.dstar
    x0 = x / (2 * q ** (1 + alpha))
    j1_hi = x ** alpha
    j2_hi = math.sqrt(x) / (math.sqrt(2) * q ** (0.5 + alpha / 2))
    t_hi = int(x ** (1 / 3) + 1e-9)
    lam = tables.lambda_
    out = {k: 0.0 for k in ("edge_d", "edge_m", "j1e1", "j1e2", "j2", "j3", "mid", "tot")}
    for d in range(dstar + 1, x + 1):
        ld = int(lam[d])
        if ld == 0:
            continue
        for m in range(1, x // d + 1):
            if 2 * d * m < x or (d * m) % q != a % q:
                continue
            out["tot"] += ld
            if d <= x0:
                out["edge_d"] += ld
                continue
            if m <= x0:
                out["edge_m"] += ld
                continue
            out["mid"] += ld
            s = sign_class_split(d, chi, sieve)
            dsv = math.isqrt(s.dm1)
            if dsv < j1_hi:
                has = any(dstar <= t <= t_hi for t in divisors(s.d1))
                out["j1e1" if has else "j1e2"] += ld
            elif dsv < j2_hi:
                out["j2"] += ld
            else:
                out["j3"] += ld
    return out


@pytest.mark.parametrize("q,a", [(23, 5), (13, 4)])
def test_je_against_brute_force(chi3, tables3, q, a):
    x = 900
    p = PartitionParams(theta=0.5, alpha=0.04)
    sieve = build_spf(x)
    rep = j_e_split_sums(x, q, a, chi3, p, tables3)
    brute = brute_je(x, q, a, tables3, chi3, sieve, 0.04)
    assert abs(rep.edge_small_d - brute["edge_d"]) < 1e-9
    assert abs(rep.edge_small_m - brute["edge_m"]) < 1e-9
    assert abs(rep.j1_e1 - brute["j1e1"]) < 1e-9
    assert abs(rep.j1_e2 - brute["j1e2"]) < 1e-9
    assert abs(rep.j2 - brute["j2"]) < 1e-9
    assert abs(rep.j3 - brute["j3"]) < 1e-9
    assert abs(rep.middle_total - brute["mid"]) < 1e-9
    assert abs(rep.window_total - brute["tot"]) < 1e-9


def test_je_conservation(chi3, tables3, params):
    rep = j_e_split_sums(X, 97, 5, chi3, params, tables3)
    assert abs(rep.bucket_total() - rep.middle_total) < 1e-6
    assert (
        abs(rep.edge_small_d + rep.edge_small_m + rep.middle_total - rep.window_total)
        < 1e-6
    )


def test_je_j2_empty_when_intervals_invert(chi3, tables3):
    # x^alpha above the second cut forces an inverted (empty) J2 interval
    p = PartitionParams(theta=0.5, alpha=0.05)
    x, q = 400, 97
    assert x ** 0.05 >= math.sqrt(x) / (math.sqrt(2) * q ** (0.5 + 0.025))
    rep = j_e_split_sums(x, q, 5, chi3, p, tables3)
    assert rep.j2 == 0.0


def test_je_middle_empty_for_small_q(chi3, tables3, params):
    # q far below sqrt(x): the edge ranges swallow every pair
    rep = j_e_split_sums(X, 7, 3, chi3, params, tables3)
    assert rep.middle_total == 0.0
    assert rep.bucket_total() == 0.0
    assert rep.window_total > 0


def test_reciprocal_gcd_examples():
    rec = reciprocal_gcd_sum(12, 0.0)
    expect = 1 / 2 + 1 / 3 + 1 / 4 + 1 / 6 + 1 / 8 + 1 / 9 + 1 / 10
    assert abs(rec.sum - expect) < 1e-12
    assert rec.bound == 12 ** -0.2
    for q in (7, 97, 9973):
        assert reciprocal_gcd_sum(q, 0.0).sum == 0.0
    rec = reciprocal_gcd_sum(1024, 0.05)
    assert rec.sum > 0 and math.isfinite(rec.ratio)
    with pytest.raises(RangeError):
        reciprocal_gcd_sum(1, 0.0)


def test_reciprocal_gcd_brute():
    for q, alpha in ((36, 0.0), (360, 0.02), (101, 0.0)):
        rec = reciprocal_gcd_sum(q, alpha)
        thr = q ** (0.2 - alpha)
        brute = sum(1 / r for r in range(1, q) if math.gcd(r, q) > thr)
        assert abs(rec.sum - brute) < 1e-12


def test_count_smooth_examples():
    sieve = build_spf(10_000)
    assert count_smooth(10, 2, sieve) == 4  # 1, 2, 4, 8
    assert count_smooth(100, 1, sieve) == 1
    for y in (1, 10, 500):
        assert count_smooth(y, y, sieve) == y
    with pytest.raises(RangeError):
        count_smooth(20_000, 10, sieve)
    with pytest.raises(RangeError):
        count_smooth(100, 0, sieve)


def test_count_smooth_brute():
    sieve = build_spf(2000)
    for y, z in ((2000, 7), (1500, 13), (100, 3)):
        brute = 1 + sum(
            1 for n in range(2, y + 1) if trial_factor(n)[-1][0] <= z
        )
        assert count_smooth(y, z, sieve) == brute


def test_report_dicts(chi3, tables3, params):
    rep = t_sums(1000, 13, 5, chi3, params, tables3)
    d = rep.to_dict()
    assert d["params"]["theta"] == 0.5
    je = j_e_split_sums(1000, 13, 5, chi3, params, tables3)
    assert set(je.to_dict()) == {
        "edge_small_d",
        "edge_small_m",
        "j1_e1",
        "j1_e2",
        "j2",
        "j3",
        "middle_total",
        "window_total",
    }
