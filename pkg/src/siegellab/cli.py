"""Command-line interface.

Subcommands: character, hunt, sieve, verify, psi, tsum, kloosterman.
JSON goes to stdout by default; tabular outputs are CSV (stable header and
column order).  Exit status: 0 success, 1 when a verify suite records
violations, 2 on usage or runtime errors.
"""

import argparse
import csv
import json
import math
import random
import sys
from dataclasses import dataclass

import numpy as np

from .character import (
    Discriminant,
    build_character_table,
    hunt_small_l_one,
)
from .convolution import IDENTITY_NAMES, IdentityReport, verify_identity
from .errors import SiegelLabError
from .expsums import kloosterman_max_avg, kloosterman_primes
from .partition import PartitionParams, j_e_split_sums, t_sums, reciprocal_gcd_sum
from .progressions import (
    ProgressionQuery,
    main_term_deviation,
    psi,
    psi_progression,
    psi_progression_all_residues,
    psi_star_split,
)
from .sieve import build_fun_tables, build_spf

DEFAULT_VERIFY_DISCS = (-3, -4, 5)
SIEVE_CSV_HEADER = ("n", "mu", "tau", "tau3", "lambda", "nu", "biglambda", "lambda_prime")
PSI_CSV_HEADER = (
    "x", "q", "a", "psi_prog", "psi_all", "phi_q", "chi_term",
    "main_term", "normalized_error", "comparator", "beta",
)
KLOOSTERMAN_CSV_HEADER = ("q", "a_max", "abs_s", "fs_ratio")


@dataclass
class RunConfig:
    subcommand: str
    disc: int = None
    limit: int = None
    x: int = None
    q: int = None
    a: int = None
    big_q: int = None
    theta: float = None
    alpha: float = None
    beta: float = 0.5
    epsilon: float = 0.001
    out: str = None
    suite: str = "identities"
    table: bool = False
    je: bool = False
    avg: bool = False
    tail_cutoff: int = 100_000
    max_abs_delta: int = None
    top_k: int = 5
    q_max: int = 12
    sample_a: int = None
    seed: int = 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="siegellab",
        description="compute and verify real-character convolution identities, "
        "progression sums, and Kloosterman-type sums over primes",
    )
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("character", help="period table and L(1,chi) for one discriminant")
    c.add_argument("--disc", type=int, required=True, help="fundamental discriminant")
    c.add_argument("--tail-cutoff", type=int, default=100_000)

    h = sub.add_parser("hunt", help="scan discriminants for the smallest L(1,chi)")
    h.add_argument("--max-abs-delta", type=int, required=True)
    h.add_argument("--top-k", type=int, default=5)
    h.add_argument("--tail-cutoff", type=int, default=None)

    s = sub.add_parser("sieve", help="emit the per-n function tables as CSV")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--disc", type=int, required=True)
    s.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="run the verification suite")
    v.add_argument("--suite", choices=("identities", "all"), default="identities")
    v.add_argument("--limit", type=int, default=10_000)
    v.add_argument("--disc", type=int, default=None,
                   help="restrict to one discriminant (default: -3, -4, 5)")

    ps = sub.add_parser("psi", help="progression sums against the twisted main term")
    ps.add_argument("--x", type=int, required=True)
    ps.add_argument("--q", type=int)
    ps.add_argument("--a", type=int)
    ps.add_argument("--disc", type=int, required=True)
    ps.add_argument("--beta", type=float, default=0.5)
    ps.add_argument("--table", action="store_true",
                    help="emit a CSV grid over (q, a) instead of one report")
    ps.add_argument("--q-max", type=int, default=12, help="grid upper bound in --table mode")
    ps.add_argument("--out")

    t = sub.add_parser("tsum", help="bucketed triple sums or the edge/middle pair split")
    t.add_argument("--x", type=int, required=True)
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--a", type=int, required=True)
    t.add_argument("--disc", type=int, required=True)
    t.add_argument("--theta", type=float, required=True)
    t.add_argument("--alpha", type=float, required=True)
    t.add_argument("--beta", type=float, default=0.5)
    t.add_argument("--epsilon", type=float, default=0.001)
    t.add_argument("--je", action="store_true", help="emit the pair-split report instead")

    k = sub.add_parser("kloosterman", help="Kloosterman-type sums over window primes")
    k.add_argument("--x", type=int, required=True)
    k.add_argument("--q", type=int)
    k.add_argument("--a", type=int)
    k.add_argument("--Q", type=int, dest="big_q", help="modulus range [Q, 2Q] (with --avg)")
    k.add_argument("--avg", action="store_true", help="max-over-units averaged mode")
    k.add_argument("--disc", type=int, help="accepted for interface symmetry; unused")
    k.add_argument("--sample-a", type=int, default=None)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    return p


def parse_and_validate(argv=None):
    """Parse argv into a RunConfig, running the owning modules' semantic
    checks up front so bad inputs fail before any heavy work."""
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(subcommand=ns.subcommand)
    for name, value in vars(ns).items():
        if name != "subcommand" and hasattr(cfg, name):
            setattr(cfg, name, value)

    if cfg.subcommand in ("character", "sieve", "psi", "tsum"):
        Discriminant(cfg.disc)
    if cfg.subcommand == "verify" and cfg.disc is not None:
        Discriminant(cfg.disc)
    if cfg.subcommand == "psi" and not cfg.table:
        if cfg.q is None or cfg.a is None:
            raise SiegelLabError("psi needs --q and --a unless --table is given")
        ProgressionQuery(cfg.x, cfg.q, cfg.a)
    if cfg.subcommand == "tsum":
        ProgressionQuery(cfg.x, cfg.q, cfg.a)
        PartitionParams(theta=cfg.theta, alpha=cfg.alpha,
                        epsilon=cfg.epsilon, beta=cfg.beta)
    if cfg.subcommand == "kloosterman":
        if cfg.avg:
            if cfg.big_q is None:
                raise SiegelLabError("kloosterman --avg needs --Q")
        else:
            if cfg.q is None or cfg.a is None:
                raise SiegelLabError("kloosterman needs --q and --a (or --Q with --avg)")
            if math.gcd(cfg.a, cfg.q) != 1:
                raise SiegelLabError(f"gcd(a, q) != 1 for a={cfg.a}, q={cfg.q}")
    if cfg.subcommand == "sieve" and cfg.limit < 2:
        raise SiegelLabError("sieve needs --limit >= 2")
    return cfg


def _emit(payload, out):
    text = json.dumps(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_csv(path, header, rows):
    def render(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    if path:
        with open(path, "w") as fh:
            render(fh)
    else:
        render(sys.stdout)


def _units(q, count=None):
    us = [a for a in range(1, q) if math.gcd(a, q) == 1]
    return us if count is None else us[:count]


def _scan_inverse(a, q):
    for b in range(1, q):
        if (a * b) % q == 1:
            return b
    return 0


def _verify_extra_reports(limit, discs):
    """Structure, conservation, and regression checks for --suite all."""
    reports = []
    for delta in discs:
        chi = build_character_table(delta, tail_cutoff=100_000)
        tables = build_fun_tables(limit, chi)

        d1, dm1, _ = tables.sign_arrays()
        ds = tables.ds_array()
        n = np.arange(1, limit + 1)
        coprime = np.gcd(n, chi.disc.modulus_D) == 1
        expect = np.where(ds[1:] >= 0, tables.tau[d1[1:]], 0)
        bad = coprime & (tables.lambda_[1:] != expect)
        reports.append(IdentityReport(
            name=f"lambda_structure[{delta}]",
            limit=limit,
            max_abs_deviation=float(np.abs(tables.lambda_[1:] - expect)[coprime].max(initial=0)),
            worst_n=int(n[bad][0]) if bad.any() else 1,
            violations=int(bad.sum()),
        ))

        x = min(limit, 100_000)
        dev = 0.0
        viol = 0
        for q in (7, 97, 101, 143):
            for a in _units(q, 3):
                query = ProgressionQuery(x, q, a)
                rec = psi_star_split(query, tables)
                gap = abs(rec.psi_star + rec.psi_lower_star - psi_progression(query, tables))
                dev = max(dev, gap)
                viol += gap > 1e-6
        reports.append(IdentityReport(
            name=f"psi_split_conservation[{delta}]", limit=x,
            max_abs_deviation=dev, worst_n=x, violations=viol,
        ))

    chi = build_character_table(discs[0], tail_cutoff=100_000)
    tables = build_fun_tables(limit, chi)
    x = min(limit, 100_000)
    total = psi(x, tables)
    dev = 0.0
    viol = 0
    for q in range(2, 201):
        gap = abs(float(psi_progression_all_residues(x, q, tables).sum()) - total)
        rel = gap / total
        dev = max(dev, rel)
        viol += rel > 1e-9
    reports.append(IdentityReport(
        name="psi_additivity", limit=x, max_abs_deviation=dev, worst_n=x,
        violations=viol,
    ))

    chi3 = build_character_table(-3, tail_cutoff=100_000)
    tables3 = build_fun_tables(min(limit, 10_000), chi3)
    params = PartitionParams(theta=0.5, alpha=0.01)
    xt = min(limit, 10_000)
    dev_t = 0.0
    dev_j = 0.0
    viol_t = 0
    viol_j = 0
    for q in (97, 101):
        rep = t_sums(xt, q, 5, chi3, params, tables3)
        dev_t = max(dev_t, rep.psi_lower_star_abs - (rep.t1 + rep.t2 + rep.t3 + rep.t4))
        viol_t += not rep.inequality_holds
        je = j_e_split_sums(xt, q, 5, chi3, params, tables3)
        gap = max(
            abs(je.bucket_total() - je.middle_total),
            abs(je.edge_small_d + je.edge_small_m + je.middle_total - je.window_total),
        )
        dev_j = max(dev_j, gap)
        viol_j += gap > 1e-6
    reports.append(IdentityReport(
        name="tsum_inequality", limit=xt, max_abs_deviation=max(dev_t, 0.0),
        worst_n=xt, violations=viol_t,
    ))
    reports.append(IdentityReport(
        name="je_conservation", limit=xt, max_abs_deviation=dev_j,
        worst_n=xt, violations=viol_j,
    ))

    worst_ratio = 0.0
    worst_q = 2
    viol = 0
    for q in range(2, min(limit, 10_000) + 1):
        ratio = reciprocal_gcd_sum(q, 0.0).ratio
        if ratio > worst_ratio:
            worst_ratio = ratio
            worst_q = q
        viol += ratio > 100
    reports.append(IdentityReport(
        name="reciprocal_gcd_regression", limit=min(limit, 10_000),
        max_abs_deviation=worst_ratio, worst_n=worst_q, violations=viol,
    ))

    xk = min(limit, 10_000)
    sieve = build_spf(xk)
    rng = random.Random(20250810)
    dev = 0.0
    viol = 0
    done = 0
    while done < 20:
        q = rng.randint(3, 500)
        a = rng.randint(1, q - 1)
        if math.gcd(a, q) != 1:
            continue
        done += 1
        rep = kloosterman_primes(xk, q, a, sieve)
        scan = {}
        s = 0.0 + 0.0j
        primes = sieve.primes()
        lo = (xk + 1) // 2
        for p in primes[(primes >= lo)].tolist():
            r = p % q
            if math.gcd(r, q) != 1:
                continue
            if r not in scan:
                scan[r] = _scan_inverse(r, q)
            t = (a * scan[r]) % q
            s += complex(math.cos(2 * math.pi * t / q), math.sin(2 * math.pi * t / q))
        gap = abs(rep.s_value - s)
        conj = abs(
            kloosterman_primes(xk, q, q - a, sieve).s_value - rep.s_value.conjugate()
        )
        dev = max(dev, gap, conj)
        viol += gap > 1e-9 or conj > 1e-10 or rep.abs_s > rep.trivial_bound
    reports.append(IdentityReport(
        name="kloosterman_exactness", limit=xk, max_abs_deviation=dev,
        worst_n=xk, violations=viol,
    ))
    return reports


def _run_verify(cfg):
    discs = (cfg.disc,) if cfg.disc is not None else DEFAULT_VERIFY_DISCS
    reports = []
    for delta in discs:
        chi = build_character_table(delta, tail_cutoff=100_000)
        tables = build_fun_tables(cfg.limit, chi)
        for name in IDENTITY_NAMES:
            reports.append(verify_identity(name, cfg.limit, chi, tables))
            reports[-1].name = f"{name}[{delta}]"
    if cfg.suite == "all":
        reports.extend(_verify_extra_reports(cfg.limit, discs))
    bad = 0
    for rep in reports:
        print(json.dumps(rep.to_dict()))
        bad += rep.violations
    return 1 if bad else 0


def execute(cfg):
    """Run one validated command; returns the process exit status."""
    if cfg.subcommand == "character":
        tab = build_character_table(cfg.disc, cfg.tail_cutoff)
        _emit({"delta": cfg.disc, "D": tab.disc.modulus_D,
               "l_one": tab.l_one, "l_one_error": tab.l_one_error}, cfg.out)
        return 0

    if cfg.subcommand == "hunt":
        found = hunt_small_l_one(cfg.max_abs_delta, cfg.top_k, cfg.tail_cutoff)
        _emit([{"delta": d, "l_one": v, "l_one_error": e} for d, v, e in found],
              cfg.out)
        return 0

    if cfg.subcommand == "sieve":
        chi = build_character_table(cfg.disc, max(cfg.tail_cutoff, abs(cfg.disc)))
        tables = build_fun_tables(cfg.limit, chi)
        rows = (
            (n, int(tables.mu[n]), int(tables.tau[n]), int(tables.tau3[n]),
             int(tables.lambda_[n]), int(tables.nu[n]),
             repr(float(tables.biglambda[n])), repr(float(tables.lambda_prime[n])))
            for n in range(1, cfg.limit + 1)
        )
        _write_csv(cfg.out, SIEVE_CSV_HEADER, rows)
        return 0

    if cfg.subcommand == "verify":
        return _run_verify(cfg)

    if cfg.subcommand == "psi":
        chi = build_character_table(cfg.disc, cfg.tail_cutoff)
        tables = build_fun_tables(cfg.x, chi)
        if cfg.table:
            rows = []
            for q in range(3, cfg.q_max + 1):
                for a in _units(q):
                    rep = main_term_deviation(
                        ProgressionQuery(cfg.x, q, a), tables, chi, cfg.beta
                    )
                    rows.append((cfg.x, q, a, repr(rep.psi_prog), repr(rep.psi_all),
                                 rep.phi_q, rep.chi_term, repr(rep.main_term),
                                 repr(rep.normalized_error), repr(rep.comparator),
                                 repr(rep.beta)))
            _write_csv(cfg.out, PSI_CSV_HEADER, rows)
            return 0
        rep = main_term_deviation(
            ProgressionQuery(cfg.x, cfg.q, cfg.a), tables, chi, cfg.beta
        )
        _emit(rep.to_dict(), cfg.out)
        return 0

    if cfg.subcommand == "tsum":
        chi = build_character_table(cfg.disc, cfg.tail_cutoff)
        tables = build_fun_tables(cfg.x, chi)
        params = PartitionParams(theta=cfg.theta, alpha=cfg.alpha,
                                 epsilon=cfg.epsilon, beta=cfg.beta)
        if cfg.je:
            rep = j_e_split_sums(cfg.x, cfg.q, cfg.a, chi, params, tables)
        else:
            rep = t_sums(cfg.x, cfg.q, cfg.a, chi, params, tables)
        _emit(rep.to_dict(), cfg.out)
        return 0

    if cfg.subcommand == "kloosterman":
        sieve = build_spf(cfg.x)
        if cfg.avg:
            rep = kloosterman_max_avg(cfg.x, cfg.big_q, sieve,
                                      sample_a=cfg.sample_a, seed=cfg.seed)
            if cfg.out:
                rows = [(q, a, repr(mag), repr(mag / q ** (15 / 16)))
                        for q, a, mag in rep.per_q_max]
                _write_csv(cfg.out, KLOOSTERMAN_CSV_HEADER, rows)
            else:
                _emit(rep.to_dict(), None)
            return 0
        rep = kloosterman_primes(cfg.x, cfg.q, cfg.a, sieve)
        if cfg.out:
            _write_csv(cfg.out, KLOOSTERMAN_CSV_HEADER,
                       [(cfg.q, cfg.a, repr(rep.abs_s), repr(rep.fs_ratio))])
        else:
            _emit(rep.to_dict(), None)
        return 0

    raise SiegelLabError(f"unknown subcommand {cfg.subcommand!r}")


def main(argv=None):
    try:
        cfg = parse_and_validate(argv)
    except SiegelLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        return execute(cfg)
    except SiegelLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e.strerror}: {e.filename}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
