"""Monte Carlo benchmark for basket calls under both model classes.

Paths are split into ``streams`` blocks, each driven by its own Philox
generator spawned from one ``SeedSequence``.  Blocks may run on several
threads; statistics are merged in block order, so results depend only on
(seed, streams, antithetic, chunk) and never on the number of workers.  The
chunk size matters because each chunk draws its normals and clock values as
separate vectorised blocks; keep the default for comparable runs.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidBasketError, MgfDomainError, SamplerError
from .laws import resolve_law
from .moments import MomentSummary
from .normal import norm_ppf

_HALF_ULP = 2.0 ** -54


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    seed: int = 0
    streams: int = 1
    antithetic: bool = False
    workers: int = 1
    chunk: int = 1 << 16

    def __post_init__(self):
        if int(self.paths) < 1 or int(self.streams) < 1:
            raise InvalidBasketError("paths and streams must be >= 1")
        if self.paths % self.streams:
            raise InvalidBasketError(f"paths ({self.paths}) must be divisible by streams ({self.streams})")
        if self.antithetic and (self.paths // self.streams) % 2:
            raise InvalidBasketError("antithetic sampling needs an even number of paths per stream")
        if self.chunk < 2:
            raise InvalidBasketError("chunk must be >= 2")


@dataclass(frozen=True)
class McResult:
    mean: float
    std_error: float
    paths: int


@dataclass(frozen=True)
class McMoments:
    summary: MomentSummary
    se_m1: float
    se_m2: float
    se_m3: float
    paths: int


class _Stats:
    """Running count/mean/M2 per column, merged with Chan's pairwise update."""

    def __init__(self, k):
        self.n = 0
        self.mean = np.zeros(k)
        self.m2 = np.zeros(k)

    def add_block(self, values):
        # values: (k, count)
        cnt = values.shape[1]
        if cnt == 0:
            return
        mean = values.mean(axis=1)
        m2 = ((values - mean[:, None]) ** 2).sum(axis=1)
        self.merge(cnt, mean, m2)

    def merge(self, cnt, mean, m2):
        if self.n == 0:
            self.n, self.mean, self.m2 = cnt, mean.copy(), m2.copy()
            return
        tot = self.n + cnt
        delta = mean - self.mean
        self.mean = self.mean + delta * (cnt / tot)
        self.m2 = self.m2 + m2 + delta * delta * (self.n * cnt / tot)
        self.n = tot

    def merge_stats(self, other):
        if other.n:
            self.merge(other.n, other.mean, other.m2)

    def std_error(self):
        if self.n < 2:
            return np.zeros_like(self.mean)
        var = np.maximum(self.m2 / (self.n - 1), 0.0)
        return np.sqrt(var / self.n)


def _normals(rng, shape):
    return norm_ppf(rng.random(shape) + _HALF_ULP)


def _log_drifts(spec, law):
    r, T = spec.rate, spec.horizon
    vol = spec.vols
    if law is None:
        return (r - 0.5 * vol * vol) * T, vol * math.sqrt(T)
    half = 0.5 * vol * vol
    if not law.in_domain(half):
        raise MgfDomainError(float(np.max(half)), law.mgf_domain_bound, law.label)
    return r * T - law.cgf(half), vol


def simulate_terminal_assets(spec, law, rng, size, antithetic=False, offset=0):
    """Terminal asset prices, shape (n_assets, size).

    With ``antithetic`` the second half of the draws reuses the first half's
    time change with negated normals.
    """
    law = resolve_law(law)
    drift, scale = _log_drifts(spec, law)
    n = spec.n_assets
    half = size // 2 if antithetic else size
    z = spec.factor.A @ _normals(rng, (n, half))
    if law is None:
        root_y = 1.0
    else:
        if law.sampler is None:
            raise SamplerError(f"law {law.label!r} has no sampler")
        try:
            y = np.asarray(law.sampler(rng, half), dtype=float)
        except SamplerError as exc:
            idx = offset + (exc.path_index or 0)
            raise SamplerError(f"sampler of {law.label!r} failed at path {idx}: {exc}", path_index=idx) from exc
        bad = ~(np.isfinite(y) & (y >= 0))
        if np.any(bad):
            idx = offset + int(np.flatnonzero(bad)[0])
            raise SamplerError(f"sampler of {law.label!r} produced an invalid draw at path {idx}", path_index=idx)
        root_y = np.sqrt(y)[None, :]
    if antithetic:
        z = np.concatenate([z, -z], axis=1)
        if law is not None:
            root_y = np.concatenate([root_y, root_y], axis=1)
    expo = drift[:, None] + scale[:, None] * root_y * z
    return spec.spots[:, None] * np.exp(expo)


def _basket(spec, assets):
    return spec.weights @ assets


def _run_streams(cfg, block_fn):
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.streams)
    per_stream = cfg.paths // cfg.streams

    def one(idx):
        rng = np.random.Generator(np.random.Philox(seeds[idx]))
        done = 0
        stats = None
        while done < per_stream:
            size = min(cfg.chunk, per_stream - done)
            if cfg.antithetic and size % 2:
                size += 1 if done + size < per_stream else -1
            block = block_fn(rng, size, idx * per_stream + done)
            if stats is None:
                stats = _Stats(block.shape[0])
            stats.add_block(block)
            done += size
        return stats

    if cfg.workers > 1 and cfg.streams > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(one, range(cfg.streams)))
    else:
        parts = [one(i) for i in range(cfg.streams)]
    total = parts[0]
    for part in parts[1:]:
        total.merge_stats(part)
    return total


def mc_price_strikes(spec, strikes, cfg, law=None):
    """Discounted call values for several strikes on one set of paths."""
    law = resolve_law(law)
    K = np.atleast_1d(np.asarray(strikes, dtype=float))
    disc = math.exp(-spec.rate * spec.horizon)

    def block(rng, size, offset):
        b = _basket(spec, simulate_terminal_assets(spec, law, rng, size, cfg.antithetic, offset))
        pay = disc * np.maximum(b[None, :] - K[:, None], 0.0)
        if cfg.antithetic:
            h = size // 2
            pay = 0.5 * (pay[:, :h] + pay[:, h:])
        return pay

    stats = _run_streams(cfg, block)
    se = stats.std_error()
    return [McResult(float(stats.mean[i]), float(se[i]), cfg.paths) for i in range(K.size)]


def mc_price_lognormal(spec, cfg):
    return mc_price_strikes(spec, [spec.strike], cfg)[0]


def mc_price_mixture(spec, law, cfg):
    return mc_price_strikes(spec, [spec.strike], cfg, law=law)[0]


def mc_asset_means(spec, cfg, law=None):
    """Discounted terminal asset means with standard errors (martingale check)."""
    law = resolve_law(law)
    disc = math.exp(-spec.rate * spec.horizon)

    def block(rng, size, offset):
        return disc * simulate_terminal_assets(spec, law, rng, size, False, offset)

    stats = _run_streams(McConfig(cfg.paths, cfg.seed, cfg.streams, False, cfg.workers, cfg.chunk), block)
    return stats.mean, stats.std_error()


def mc_moments(spec, law, cfg):
    """Sample raw moments of B(T) with their standard errors."""
    law = resolve_law(law)

    def block(rng, size, offset):
        b = _basket(spec, simulate_terminal_assets(spec, law, rng, size, False, offset))
        return np.vstack([b, b * b, b * b * b])

    stats = _run_streams(McConfig(cfg.paths, cfg.seed, cfg.streams, False, cfg.workers, cfg.chunk), block)
    se = stats.std_error()
    m1, m2, m3 = (float(v) for v in stats.mean)
    return McMoments(MomentSummary.from_raw(m1, m2, m3), float(se[0]), float(se[1]), float(se[2]), cfg.paths)
