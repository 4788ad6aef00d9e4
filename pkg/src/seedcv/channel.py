"""Monte Carlo quadrature records for a CV-MDI-QKD session.

Alice and Bob prepare Gaussian-modulated coherent states, each state crosses
a linear Gaussian channel to the relay (Charlie), the two modes meet on a
balanced beam splitter and every output quadrature is read out by an
imperfect detector. Seeding scales what is actually transmitted while the
senders keep their un-seeded records, which is what biases their estimates.

Random numbers come from Philox streams derived per fixed-size chunk from
the session seed, so a batch does not depend on how many worker threads
generate it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import N0, AttackConfig, ChannelTruth, DetectorModel, MdiParams, QuadraturePair

CHUNK_SIZE = 1 << 16
CSV_COLUMNS = ("idx", "x_A0", "p_B0", "x_C", "p_C", "x_D", "p_D")


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Per-round records held by Alice (``x_A0``), Bob (``p_B0``) and Charlie."""

    x_A0: np.ndarray
    p_B0: np.ndarray
    x_C: np.ndarray
    p_C: np.ndarray
    x_D: np.ndarray
    p_D: np.ndarray
    rng_seed: int | None = None

    def __post_init__(self):
        lengths = {len(getattr(self, c)) for c in CSV_COLUMNS[1:]}
        if len(lengths) != 1:
            raise ValueError("all record arrays must have the same length")
        if lengths.pop() < 2:
            raise ValueError("a sample batch needs at least 2 rounds")
        for c in CSV_COLUMNS[1:]:
            getattr(self, c).setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.x_A0)

    def columns(self) -> np.ndarray:
        return np.column_stack([getattr(self, c) for c in CSV_COLUMNS[1:]])

    def equals(self, other: SampleBatch) -> bool:
        return self.n == other.n and np.array_equal(self.columns(), other.columns())

    def to_csv(self, path) -> None:
        data = np.column_stack([np.arange(self.n), self.columns()])
        fmt = ["%d"] + ["%.17g"] * (len(CSV_COLUMNS) - 1)
        np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(CSV_COLUMNS),
                   comments="", encoding="utf-8")

    @classmethod
    def from_csv(cls, path) -> SampleBatch:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: expected header {','.join(CSV_COLUMNS)}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        order = np.argsort(data[:, 0], kind="stable")
        data = data[order]
        return cls(*(np.ascontiguousarray(data[:, i]) for i in range(1, len(CSV_COLUMNS))))


def sample_linear_channel(q: QuadraturePair, ch: ChannelTruth, rng=None, *, noise=None,
                          N0: float = N0) -> QuadraturePair:
    """Propagate through ``out = sqrt(T) * in + z``, ``Var z = T*eps*N0 + N0``.

    ``noise`` replaces the random draw with an explicit ``(z_x, z_p)`` pair.
    """
    t = math.sqrt(ch.T)
    if noise is None:
        sigma = math.sqrt(ch.noise_variance(N0))
        zx = rng.normal(0.0, sigma, np.shape(q.x))
        zp = rng.normal(0.0, sigma, np.shape(q.p))
    else:
        zx, zp = noise
    return QuadraturePair(t * q.x + zx, t * q.p + zp)


def apply_intercept_resend(q_transmitted: QuadraturePair, u: float, rng,
                           N0: float = N0) -> QuadraturePair:
    """Intercept a fraction ``u`` of the states and resend them.

    An intercepted state is heterodyned and re-prepared, which adds Gaussian
    noise of variance ``2*N0`` to each quadrature. Averaged over rounds the
    input-referred excess noise grows by ``2*u*N0``.
    """
    if not 0 <= u <= 1:
        raise ValueError(f"intercept fraction must lie in [0, 1], got {u}")
    if u == 0:
        return q_transmitted
    shape = np.shape(q_transmitted.x)
    hit = rng.random(shape) < u
    sigma = math.sqrt(2 * N0)
    nx = rng.normal(0.0, sigma, shape)
    np_ = rng.normal(0.0, sigma, shape)
    return QuadraturePair(q_transmitted.x + hit * nx, q_transmitted.p + hit * np_)


def detect(x, det: DetectorModel, rng, N0: float = N0):
    """Imperfect detection ``sqrt(eta)*x + sqrt(1-eta)*vacuum + electronic``."""
    shape = np.shape(x)
    vac = rng.normal(0.0, math.sqrt(N0), shape)
    el = rng.normal(0.0, math.sqrt(det.nu_el * N0), shape)
    return math.sqrt(det.eta) * x + math.sqrt(1 - det.eta) * vac + el


def _simulate_chunk(params: MdiParams, attack: AttackConfig, m: int, seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.Philox(seq))
    sd_a, sd_b = math.sqrt(params.V_A * N0), math.sqrt(params.V_B * N0)
    x_A0 = rng.normal(0.0, sd_a, m)
    p_A0 = rng.normal(0.0, sd_a, m)
    x_B0 = rng.normal(0.0, sd_b, m)
    p_B0 = rng.normal(0.0, sd_b, m)

    ga, gb = math.sqrt(attack.g_alice), math.sqrt(attack.g_bob)
    a_tx = apply_intercept_resend(QuadraturePair(ga * x_A0, ga * p_A0), attack.u, rng)
    b_tx = apply_intercept_resend(QuadraturePair(gb * x_B0, gb * p_B0), attack.u_bob, rng)
    a = sample_linear_channel(a_tx, params.channel_AC, rng)
    b = sample_linear_channel(b_tx, params.channel_BC, rng)

    r = 1 / math.sqrt(2)
    det = params.charlie_det
    x_C = detect(r * (a.x - b.x), det, rng)
    p_C = detect(r * (a.p - b.p), det, rng)
    x_D = detect(r * (a.x + b.x), det, rng)
    p_D = detect(r * (a.p + b.p), det, rng)
    return x_A0, p_B0, x_C, p_C, x_D, p_D


def simulate_mdi_session(params: MdiParams, attack: AttackConfig, n: int, seed: int,
                         workers: int = 1) -> SampleBatch:
    """Simulate ``n`` rounds and return the records each party holds.

    Rounds are generated in chunks of ``CHUNK_SIZE``; chunk ``k`` draws from
    the ``k``-th child of ``SeedSequence(seed)``. ``workers`` only changes
    wall time, never the output.
    """
    if n < 2:
        raise ValueError(f"need at least 2 rounds, got {n}")
    if not isinstance(attack, AttackConfig):
        raise TypeError("attack must be an AttackConfig")
    n_chunks = -(-n // CHUNK_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK_SIZE, n - k * CHUNK_SIZE) for k in range(n_chunks)]

    def run(k):
        return _simulate_chunk(params, attack, sizes[k], seqs[k])

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_chunks)))
    else:
        parts = [run(k) for k in range(n_chunks)]
    cols = [np.concatenate(c) for c in zip(*parts)]
    return SampleBatch(*cols, rng_seed=seed)
