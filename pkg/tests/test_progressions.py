import math

import numpy as np
import pytest

from siegellab.character import build_character_table
from siegellab.errors import RangeError
from siegellab.progressions import (
    DeviationReport,
    ProgressionQuery,
    bt_rough_prime_count,
    euler_phi,
    main_term_deviation,
    psi,
    psi_progression,
    psi_progression_all_residues,
    psi_star_split,
    shiu_ratio,
    tilt_exponent,
    tilted_progression_sum,
)
from siegellab.sieve import build_fun_tables, build_spf

from oracles import is_prime, trial_factor, von_mangoldt

X = 20_000


@pytest.fixture(scope="module")
def chi3():
    return build_character_table(-3, tail_cutoff=100_000)


@pytest.fixture(scope="module")
def chi4():
    return build_character_table(-4, tail_cutoff=100_000)


@pytest.fixture(scope="module")
def chi5():
    return build_character_table(5, tail_cutoff=100_000)


@pytest.fixture(scope="module")
def tables3(chi3):
    return build_fun_tables(X, chi3)


@pytest.fixture(scope="module")
def tables4(chi4):
    return build_fun_tables(X, chi4)


def test_euler_phi_examples():
    assert euler_phi(1) == 1
    assert euler_phi(12) == 4
    assert euler_phi(97) == 96
    for q in range(1, 300):
        assert euler_phi(q) == sum(1 for r in range(1, q + 1) if math.gcd(r, q) == 1)


def test_query_validation():
    ProgressionQuery(100, 7, 3)
    with pytest.raises(RangeError):
        ProgressionQuery(100, 7, 14)
    with pytest.raises(RangeError):
        ProgressionQuery(100, 4, 2)
    with pytest.raises(RangeError):
        ProgressionQuery(0, 7, 3)


def test_psi_examples(tables4):
    assert psi(1, tables4) == 0.0
    assert abs(psi(2, tables4) - math.log(2)) < 1e-12
    # prime powers <= 10 are 2, 3, 4, 5, 7, 8, 9
    expect = 3 * math.log(2) + 2 * math.log(3) + math.log(5) + math.log(7)
    assert abs(psi(10, tables4) - expect) < 1e-12
    brute = sum(von_mangoldt(n) for n in range(1, 501))
    assert abs(psi(500, tables4) - brute) < 1e-9


def test_psi_progression_examples(tables4):
    # qualifying n <= 20 with n = 1 (mod 4): 5, 9, 13, 17
    v = psi_progression(ProgressionQuery(20, 4, 1), tables4)
    expect = math.log(5) + math.log(3) + math.log(13) + math.log(17)
    assert abs(v - expect) < 1e-12
    assert psi_progression(ProgressionQuery(2, 5, 4), tables4) == 0.0


def test_psi_progression_brute(tables4):
    q, a, x = 9, 4, 5000
    brute = sum(von_mangoldt(n) for n in range(1, x + 1) if n % q == a)
    assert abs(psi_progression(ProgressionQuery(x, q, a), tables4) - brute) < 1e-9


def test_additivity_partition(tables4):
    # all residues, units or not, partition psi(x)
    for q in (7, 97, 143, 200):
        parts = psi_progression_all_residues(10_000, q, tables4)
        total = psi(10_000, tables4)
        assert len(parts) == q
        assert abs(parts.sum() - total) <= 1e-9 * total


def test_main_term_examples(tables4, chi4, chi5):
    rep = main_term_deviation(ProgressionQuery(10_000, 4, 1), tables4, chi4)
    assert rep.chi_term == 1
    assert rep.main_term == 0.0
    rep = main_term_deviation(ProgressionQuery(10_000, 4, 3), tables4, chi4)
    assert rep.chi_term == -1
    assert abs(rep.main_term - psi(10_000, tables4)) < 1e-9
    tables5 = build_fun_tables(10_000, chi5)
    rep = main_term_deviation(ProgressionQuery(10_000, 3, 2), tables5, chi5)
    assert rep.chi_term == 0
    assert math.isfinite(rep.normalized_error)
    assert rep.comparator > 0


def test_main_term_errors(tables4, chi4):
    with pytest.raises(RangeError):
        main_term_deviation(ProgressionQuery(1, 4, 3), tables4, chi4)
    with pytest.raises(RangeError):
        main_term_deviation(ProgressionQuery(100, 4, 3), tables4, chi4, beta=1.5)


def test_main_term_roundtrip(tables4, chi4):
    rep = main_term_deviation(ProgressionQuery(1000, 4, 3), tables4, chi4)
    assert DeviationReport.from_dict(rep.to_dict()) == rep


@pytest.mark.parametrize("delta", [-3, -4, 5])
@pytest.mark.parametrize("q,a", [(7, 3), (97, 5), (101, 2), (143, 12)])
def test_psi_star_split_conservation(delta, q, a):
    chi = build_character_table(delta, tail_cutoff=10_000)
    tables = build_fun_tables(X, chi)
    query = ProgressionQuery(X, q, a)
    rec = psi_star_split(query, tables)
    direct = psi_progression(query, tables)
    assert abs(rec.psi_star + rec.psi_lower_star - direct) < 1e-6


def test_psi_star_split_trivial(chi3, tables3):
    # D* >= x forces the lower part to vanish
    rec = psi_star_split(ProgressionQuery(8, 7, 3), tables3)
    assert rec.psi_lower_star == 0.0
    rec = psi_star_split(ProgressionQuery(1, 7, 3), tables3)
    assert rec.psi_star == 0.0 and rec.psi_lower_star == 0.0


def test_psi_star_split_brute(chi3, tables3):
    # independent double loop
    x, q, a = 600, 7, 3
    dstar = 9
    star = low = 0.0
    for d in range(1, x + 1):
        for m in range(1, x // d + 1):
            if (d * m) % q == a:
                term = int(tables3.nu[d]) * float(tables3.lambda_prime[m])
                if d <= dstar:
                    star += term
                else:
                    low += term
    rec = psi_star_split(ProgressionQuery(x, q, a), tables3)
    assert abs(rec.psi_star - star) < 1e-9
    assert abs(rec.psi_lower_star - low) < 1e-9


def test_tilted_sum_sigma_zero(tables4):
    x, q, a = 8000, 11, 4
    plain = tilted_progression_sum(tables4.lambda_, x, q, a, 0.0)
    n0 = x // 2 + 1
    brute = sum(
        int(tables4.lambda_[n]) for n in range(n0, x + 1) if n % q == a
    )
    assert plain == brute


def test_tilted_sum_monotone_in_sigma(tables4):
    x, q, a = 8000, 11, 4
    vals = [tilted_progression_sum(tables4.lambda_, x, q, a, s) for s in (0.0, 0.1, 0.5, 1.0)]
    assert all(vals[i] >= vals[i + 1] for i in range(len(vals) - 1))


def test_tilt_direction_both_signs(tables4):
    # termwise: (x/2)^sigma * sum f(n) n^-sigma vs the plain sum flips with
    # the sign of sigma over the window n > x/2
    x, q, a = 8000, 11, 4
    plain = tilted_progression_sum(tables4.lambda_, x, q, a, 0.0)
    for sigma in (-0.4, -0.1):
        tilted = tilted_progression_sum(tables4.lambda_, x, q, a, sigma)
        assert (x / 2) ** sigma * tilted >= plain * (1 - 1e-12)
    for sigma in (0.1, 0.4):
        tilted = tilted_progression_sum(tables4.lambda_, x, q, a, sigma)
        assert (x / 2) ** sigma * tilted <= plain * (1 + 1e-12)


def test_tilt_exponent_desk_scale_and_example(chi4, tables4):
    # no exceptional character at desk scale: L(1,chi) > 1/log x, so the
    # computed exponent is negative and the stated direction holds
    sigma = tilt_exponent(chi4.l_one, 100_000)
    assert sigma < 0
    x, q, a = 8000, 101, 5
    s2 = tilt_exponent(chi4.l_one, x)
    tilted = tilted_progression_sum(tables4.lambda_, x, q, a, s2)
    plain = tilted_progression_sum(tables4.lambda_, x, q, a, 0.0)
    assert tilted > 0
    assert (x / 2) ** s2 * tilted >= plain * (1 - 1e-12)


def test_bt_count_example(chi5):
    sieve = build_spf(10_000)
    rec = bt_rough_prime_count(100, 3, 1, chi5, sieve)
    assert rec.count == 4  # 19, 31, 61, 79
    assert rec.ratio == 4 * 3 / (100 * chi5.l_one)


def test_bt_count_trivial(chi5):
    sieve = build_spf(100)
    rec = bt_rough_prime_count(2, 5, 4, chi5, sieve)
    assert rec.count == 0


def test_bt_count_plain_matches_prime_sieve(chi4):
    sieve = build_spf(5000)
    rec = bt_rough_prime_count(5000, 3, 1, None, sieve)
    brute = sum(1 for p in range(2, 5001) if is_prime(p) and p % 3 == 1)
    assert rec.count == brute


def test_bt_count_chi_restriction_brute(chi4):
    sieve = build_spf(5000)
    rec = bt_rough_prime_count(5000, 3, 1, chi4, sieve)
    brute = sum(
        1
        for p in range(2, 5001)
        if is_prime(p) and p % 3 == 1 and p % 4 == 1
    )
    assert rec.count == brute
    assert rec.ratio > 0


def test_shiu_ratio_tau(tables4):
    rec = shiu_ratio("tau_k_power", X, X // 2, 101, 5, tables4)
    assert rec.lhs > 0 and rec.rhs > 0
    assert 0.1 < rec.ratio < 20
    again = shiu_ratio("tau_k_power", X, X // 2, 101, 5, tables4)
    assert again.ratio == rec.ratio  # deterministic


def test_shiu_ratio_brute_window(tables4):
    x, y, q, b = 3000, 1500, 17, 5
    rec = shiu_ratio("tau_k_power", x, y, q, b, tables4)
    brute = sum(
        int(tables4.tau[n]) for n in range(x - y + 1, x + 1) if n % q == b
    )
    assert rec.lhs == brute


def test_shiu_ratio_lambda_forms(tables4):
    for name in ("lambda", "lambda_sq_tau"):
        rec = shiu_ratio(name, X, X // 2, 101, 5, tables4)
        assert rec.lhs >= 0 and rec.rhs > 0 and math.isfinite(rec.ratio)


def test_shiu_ratio_sparse_window(tables4):
    # q just under the y^(1-alpha1) cutoff leaves very few window hits
    rec = shiu_ratio("tau_k_power", X, X // 2, 9973, 5, tables4, alpha1=0.0)
    assert rec.lhs >= 0 and math.isfinite(rec.ratio)


def test_shiu_ratio_precondition_errors(tables4):
    with pytest.raises(RangeError):
        shiu_ratio("tau_k_power", X, X // 2, 5000, 7, tables4)  # q too large
    with pytest.raises(RangeError):
        shiu_ratio("tau_k_power", X, 5, 3, 1, tables4)  # window too short
    with pytest.raises(RangeError):
        shiu_ratio("nope", X, X // 2, 101, 5, tables4)
    with pytest.raises(RangeError):
        shiu_ratio("tau_k_power", X, X // 2, 101, 202, tables4)  # gcd(b,q)>1
