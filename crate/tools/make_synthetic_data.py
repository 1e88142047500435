#!/usr/bin/env python3
"""Generate the bundled synthetic dataset under data/.

The series mimic the shape of a 30-trading-day option window (2020-10-08
through 2020-11-20, weekdays minus two synthetic market holidays): an
AAL-like stock path, a VIX path, and market option closes produced from the
expanded pricing formula with a known extra-volatility profile so that
calibration has something real to recover. Everything is seeded and
deterministic; re-running reproduces the same bytes.

Also prints the reference VIX value for data/chain.csv computed by direct
summation, which is frozen into the test suites.
"""
import math
import os
import random
from datetime import date, timedelta

OUT = os.path.join(os.path.dirname(__file__), "..", "data")
RATE = 0.0008
BETA_AAL = 1.71
STRIKE = 13.0

HOLIDAYS = {date(2020, 10, 12), date(2020, 11, 11)}


def trading_days():
    d = date(2020, 10, 8)
    end = date(2020, 11, 20)
    out = []
    while d <= end:
        if d.weekday() < 5 and d not in HOLIDAYS:
            out.append(d)
        d += timedelta(days=1)
    return out


def ncdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def bs_call(S, K, T, r, sigma):
    if T <= 0.0 or sigma <= 0.0:
        return max(S - K * math.exp(-r * T), 0.0)
    st = sigma * math.sqrt(T)
    d1 = (math.log(S / K) + (r + sigma * sigma / 2) * T) / st
    return S * ncdf(d1) - K * math.exp(-r * T) * ncdf(d1 - st)


def write_csv(name, header, rows):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(str(c) for c in row) + "\n")
    print(f"wrote {path} ({len(rows)} rows)")


def main():
    os.makedirs(OUT, exist_ok=True)
    days = trading_days()
    assert len(days) == 30, len(days)
    rng = random.Random(20201008)

    # VIX path: mean-reverting around 30, two decimals
    vix = []
    v = 28.0
    for _ in days:
        v += 0.15 * (30.0 - v) + rng.gauss(0.0, 1.4)
        v = max(18.0, min(45.0, v))
        vix.append(round(v, 2))

    # stock path: AAL-like random walk, two decimals
    stock = []
    s = 12.60
    for i, _ in enumerate(days):
        sigma = BETA_AAL * vix[i] / 100.0
        s *= math.exp(rng.gauss(0.0, sigma / math.sqrt(252.0)))
        stock.append(round(s, 2))

    # market option closes from the expanded formula (gamma=1, Wiener), with a
    # known Im(f) profile: over-performance early, a dip below the classical
    # price mid-window, then a ramp back up
    opt = []
    n = len(days)
    for i in range(n):
        T = (n - 1 - i) / 252.0
        sigma = BETA_AAL * vix[i] / 100.0
        if i < 10:
            s_gen = math.sqrt(sigma * sigma + 0.15**2)
        elif i < 15:
            s_gen = 0.85 * sigma  # under-performance: imaginary regime
        else:
            b = 0.05 + 0.25 * (i - 15) / max(1, n - 16)
            s_gen = math.sqrt(sigma * sigma + b * b)
        opt.append(round(bs_call(stock[i], STRIKE, T, RATE, s_gen), 4))

    iso = [d.isoformat() for d in days]
    write_csv("stock.csv", "date,value", list(zip(iso, stock)))
    write_csv("vix.csv", "date,value", list(zip(iso, vix)))
    write_csv("option.csv", "date,value", list(zip(iso, opt)))

    betas = [
        ("AAL", 1.71), ("AAPL", 1.36), ("AMD", 2.32), ("AMZN", 1.31),
        ("BA", 1.41), ("BAC", 1.57), ("BRK-B", 0.84), ("C", 1.82),
        ("GS", 1.42), ("INTC", 0.68), ("JPM", 1.12), ("M", 1.82),
        ("MAR", 1.68), ("NFLX", 0.98), ("NKE", 0.82), ("PFE", 0.72),
        ("RCL", 2.76), ("TSLA", 1.97), ("WMT", 0.40), ("ZM", 1.05),
    ]
    write_csv("beta.csv", "ticker,beta", betas)

    with open(os.path.join(OUT, "config.txt"), "w") as f:
        f.write("rate=0.0008\n")
        f.write("gamma=1\n")
        f.write("k_mode=wiener\n")
        f.write("beta_table=beta.csv\n")
        f.write("day_count=252\n")
    print("wrote data/config.txt")

    with open(os.path.join(OUT, "spec_aal.txt"), "w") as f:
        f.write("ticker=AAL\n")
        f.write("strike=13\n")
        f.write("issue=2020-10-08\n")
        f.write("expiry=2020-11-20\n")
    print("wrote data/spec_aal.txt")

    # index option chain: strikes 3300..3700 step 25, forward near 3497
    F0, volc, Tc = 3497.3, 0.25, 30.0 / 365.0
    chain = []
    for k in range(3300, 3701, 25):
        st = volc * math.sqrt(Tc)
        d1 = (math.log(F0 / k) + st * st / 2) / st
        call = math.exp(-RATE * Tc) * (F0 * ncdf(d1) - k * ncdf(d1 - st))
        put = call - math.exp(-RATE * Tc) * (F0 - k)
        call, put = round(call, 2), round(put, 2)
        q = min(call, put) if k != 3500 else round((call + put) / 2, 2)
        chain.append((k, call, put, q))
    write_csv("chain.csv", "strike,call_mid,put_mid,q_mid", chain)

    print("\nreference vix for data/chain.csv:")
    print(f"  vix = {chain_vix(chain, Tc, RATE)!r}")

    # small hand-summable chain used in the unit tests
    unit = [
        (90.0, 11.0, 1.0, 1.0),
        (95.0, 7.0, 2.0, 2.0),
        (100.0, 4.0, 4.0, 4.0),
        (105.0, 2.0, 7.0, 2.0),
        (110.0, 1.0, 11.0, 1.0),
    ]
    print("reference vix for the 5-strike unit chain (T=30/365, R=0):")
    print(f"  vix = {chain_vix(unit, 30.0 / 365.0, 0.0)!r}")


def chain_vix(rows, T, R):
    """Direct summation per the single-expiry variance-strip formula."""
    ks = [r[0] for r in rows]
    i_min = min(range(len(rows)), key=lambda i: abs(rows[i][1] - rows[i][2]))
    F = ks[i_min] + math.exp(R * T) * (rows[i_min][1] - rows[i_min][2])
    k0_idx = max(i for i in range(len(ks)) if ks[i] <= F)
    k0 = ks[k0_idx]
    total = 0.0
    for i, (k, call, put, _q) in enumerate(rows):
        if i == 0:
            dk = ks[1] - ks[0]
        elif i == len(ks) - 1:
            dk = ks[-1] - ks[-2]
        else:
            dk = (ks[i + 1] - ks[i - 1]) / 2.0
        if k < k0:
            q = put
        elif k > k0:
            q = call
        else:
            q = (call + put) / 2.0
        total += dk / (k * k) * math.exp(R * T) * q
    var = 2.0 / T * total - ((F / k0 - 1.0) ** 2) / T
    return 100.0 * math.sqrt(var)


if __name__ == "__main__":
    main()
