"""Regenerate pinned oracle values independently of basketmm.

Run: python3 tests/oracles/generate.py   (about 30 s)
"""
import json
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def cubic_root(eta):
    f = lambda x: x ** 3 + 3 * x ** 2 - 4 - eta ** 2
    lo, hi = mp.mpf(1), mp.mpf(1) + eta ** 2
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
    return (lo + hi) / 2


def bs_call(S, K, sig, r, T):
    S, K, sig, r, T = map(mp.mpf, (S, K, sig, r, T))
    d1 = (mp.log(S / K) + (r + sig ** 2 / 2) * T) / (sig * mp.sqrt(T))
    d2 = d1 - sig * mp.sqrt(T)
    return S * mp.ncdf(d1) - K * mp.exp(-r * T) * mp.ncdf(d2)


def mc_summary(spots, vols, weights, rho, r, T, law, paths, seed):
    rng = np.random.default_rng(seed)
    spots, vols, weights = map(np.asarray, (spots, vols, weights))
    L = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    acc = np.zeros(3)
    sums = []
    for _ in range(paths // 500_000):
        z = L @ rng.standard_normal((2, 500_000))
        if law == "lognormal":
            x = (r - vols ** 2 / 2)[:, None] * T + (vols * np.sqrt(T))[:, None] * z
        else:  # exp1: E[e^{s Y}] = 1/(1-s)
            y = rng.exponential(1.0, 500_000)
            x = (r * T + np.log1p(-vols ** 2 / 2))[:, None] + vols[:, None] * np.sqrt(y) * z
        b = weights @ (spots[:, None] * np.exp(x))
        sums.append(b)
    b = np.concatenate(sums)
    mu, sd = b.mean(), b.std()
    dev = b - mu
    eta = np.mean(dev ** 3) / sd ** 3
    n = b.size
    # delta-method-free SEs: bootstrap over 20 batches
    batches = b.reshape(20, -1)
    bm = batches.mean(1)
    bsd = batches.std(1)
    beta = np.array([np.mean((x - x.mean()) ** 3) / x.std() ** 3 for x in batches])
    return {"mu": mu, "sigma": sd, "eta": eta,
            "se_mu": bm.std(ddof=1) / np.sqrt(20), "se_sigma": bsd.std(ddof=1) / np.sqrt(20),
            "se_eta": beta.std(ddof=1) / np.sqrt(20), "paths": n}


out = {
    "cubic_root_eta2": str(cubic_root(mp.mpf(2))),
    "cubic_root_eta_half": str(cubic_root(mp.mpf("0.5"))),
    "cubic_root_eta10": str(cubic_root(mp.mpf(10))),
    "bs_100_100_02_003_1": str(bs_call(100, 100, 0.2, 0.03, 1)),
    "scenario3_lognormal": mc_summary([110, 90], [0.3, 0.2], [0.7, 0.3], 0.9, 0.03, 1.0, "lognormal", 10_000_000, 20240101),
    "scenario1_exp1": mc_summary([100, 120], [0.2, 0.3], [-1, 1], 0.9, 0.03, 1.0, "exp1", 10_000_000, 20240102),
}
Path(__file__).with_name("pinned.json").write_text(json.dumps(out, indent=2, default=float) + "\n")
print(json.dumps(out, indent=2, default=float))
