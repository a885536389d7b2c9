"""Symbol-level simulation of the two-hop AF chain.

Gray-coded QPSK streams are sent through the source-to-relay hop, weighted and
forwarded by the relays (plain weighting, or the Alamouti-structured two-slot
weighting), and detected at each user with known effective channels,
interference treated as noise.  Empirical SINR uses a correlation estimator:
the power captured by the best scalar fit to the transmitted symbols is the
desired power, the residual is interference plus noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import DISTRIBUTED


@dataclass
class LinkRunResult:
    """Per-user empirical SINR (linear) and uncoded BER from one run."""

    sinr: np.ndarray
    ber: np.ndarray
    n_sym: int
    seed: int
    relay_power: float = 0.0


def alamouti_encode(x):
    """2x2 orthogonal space-time block for a symbol pair."""
    x1, x2 = x
    return np.array([[x1, x2], [-np.conj(x2), np.conj(x1)]])


def weights_matrix(cfg, w):
    """Lift a design vector to the relay weighting matrix of the right kind."""
    L = cfg.n_relays
    w = np.asarray(w, dtype=complex)
    if cfg.kind == DISTRIBUTED:
        if w.shape != (L,):
            raise ValueError("distributed weighting vector must have length L")
        return np.diag(w)
    if w.shape != (L * L,):
        raise ValueError("mimo weighting vector must have length L^2")
    return w.reshape(L, L, order="F")  # column-stacking convention


def _check_weights(cfg, V):
    V = np.asarray(V, dtype=complex)
    L = cfg.n_relays
    if V.shape != (L, L):
        raise ValueError(f"weighting matrix must be {L}x{L}")
    if cfg.kind == DISTRIBUTED and np.max(np.abs(V - np.diag(np.diag(V)))) > 1e-12:
        raise ValueError("distributed relays require a diagonal weighting matrix")
    return V


def _qpsk(rng, power, n):
    """Gray-coded QPSK stream at the given symbol power, plus its bits."""
    bits = rng.integers(0, 2, size=(2, n))
    sym = ((1.0 - 2.0 * bits[0]) + 1j * (1.0 - 2.0 * bits[1])) * np.sqrt(power / 2.0)
    return sym, bits


def _cn(rng, var, shape):
    scale = np.sqrt(np.asarray(var) / 2.0)
    if np.ndim(var) == 1:  # per-row variance
        scale = scale[:, None]
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _measure(z, s, gain=None):
    """Desired/residual power split of z against pilot s.

    With the known effective gain (genie-aided) the estimator error comes only
    from the residual-power average; without it the gain is estimated by
    correlation, which adds noise of order 1/sqrt(n * SINR).
    """
    if gain is None:
        gain = np.mean(z * np.conj(s)) / np.mean(np.abs(s) ** 2)
    desired = np.abs(gain) ** 2 * np.mean(np.abs(s) ** 2)
    residual = np.mean(np.abs(z - gain * s) ** 2)
    return desired / residual


def _qpsk_ber(z, bits):
    detected = np.vstack([(z.real < 0).astype(int), (z.imag < 0).astype(int)])
    return float(np.mean(detected != bits))


def simulate_bf(cfg, ch, V, n_sym, seed):
    """Simulate the plain beamformed AF chain and measure SINR/BER per user."""
    V = _check_weights(cfg, V)
    rng = np.random.default_rng(seed)
    G, L, M = cfg.n_groups, cfg.n_relays, cfg.n_users

    streams = [_qpsk(rng, cfg.tx_power[j], n_sym) for j in range(G)]
    S = np.vstack([s for s, _ in streams])
    relay_in = ch.f.T @ S + _cn(rng, np.asarray(cfg.relay_noise), (L, n_sym))
    X = V @ relay_in
    relay_power = float(np.mean(np.sum(np.abs(X) ** 2, axis=0)))

    sinr = np.empty(M)
    ber = np.empty(M)
    groups = cfg.user_groups
    for u in range(M):
        k = groups[u]
        y = np.conj(ch.g[u]) @ X + _cn(rng, cfg.user_noise[u], n_sym)
        s_k, bits = streams[k]
        h_eff = np.conj(ch.g[u]) @ V @ ch.f[k]
        sinr[u] = _measure(y, s_k, gain=h_eff)
        ber[u] = _qpsk_ber(y / h_eff, bits) if h_eff != 0 else 0.5
    return LinkRunResult(sinr=sinr, ber=ber, n_sym=n_sym, seed=seed, relay_power=relay_power)


def simulate_bfa(cfg, ch, V1, V2, n_sym_pairs, seed):
    """Simulate the beamformed-Alamouti AF chain over two-slot blocks.

    Each relay combines its two weighting rows with the Alamouti block of its
    received symbol pair; the receiver applies the standard orthogonal
    combiner with known effective channels.
    """
    V1 = _check_weights(cfg, V1)
    V2 = _check_weights(cfg, V2)
    rng = np.random.default_rng(seed)
    G, L, M = cfg.n_groups, cfg.n_relays, cfg.n_users
    n = n_sym_pairs

    streams = [
        (_qpsk(rng, cfg.tx_power[j], n), _qpsk(rng, cfg.tx_power[j], n)) for j in range(G)
    ]
    S1 = np.vstack([a[0] for a, _ in streams])
    S2 = np.vstack([b[0] for _, b in streams])
    relay_var = np.asarray(cfg.relay_noise)
    R1 = ch.f.T @ S1 + _cn(rng, relay_var, (L, n))
    R2 = ch.f.T @ S2 + _cn(rng, relay_var, (L, n))

    # Two-slot relay transmit block: rows [v1, v2] times the Alamouti code of
    # the received pair, summed over incoming relay signals.
    X1 = V1 @ R1 - V2 @ np.conj(R2)
    X2 = V1 @ R2 + V2 @ np.conj(R1)
    relay_power = float(
        0.5 * np.mean(np.sum(np.abs(X1) ** 2, axis=0) + np.sum(np.abs(X2) ** 2, axis=0))
    )

    sinr = np.empty(M)
    ber = np.empty(M)
    groups = cfg.user_groups
    for u in range(M):
        k = groups[u]
        g_h = np.conj(ch.g[u])
        y1 = g_h @ X1 + _cn(rng, cfg.user_noise[u], n)
        y2 = g_h @ X2 + _cn(rng, cfg.user_noise[u], n)
        a1 = g_h @ V1 @ ch.f[k]
        a2 = g_h @ V2 @ np.conj(ch.f[k])
        z1 = np.conj(a1) * y1 + a2 * np.conj(y2)
        z2 = np.conj(a1) * y2 - a2 * np.conj(y1)
        norm = np.abs(a1) ** 2 + np.abs(a2) ** 2

        (s1, bits1), (s2, bits2) = streams[k]
        z = np.concatenate([z1, z2])
        s = np.concatenate([s1, s2])
        sinr[u] = _measure(z, s, gain=norm)
        if norm > 0:
            ber[u] = 0.5 * (_qpsk_ber(z1 / norm, bits1) + _qpsk_ber(z2 / norm, bits2))
        else:
            ber[u] = 0.5
    return LinkRunResult(sinr=sinr, ber=ber, n_sym=n, seed=seed, relay_power=relay_power)
