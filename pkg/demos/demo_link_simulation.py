"""Walkthrough: validate the SINR formulas with a symbol-level QPSK simulation.

A designed beamformer pair is pushed through the full two-hop chain -- QPSK
sources, noisy relays applying the Alamouti-structured two-slot weighting,
noisy receivers with orthogonal combining -- and the measured SINR per user is
compared against the closed-form quadratic-form expression.
"""

import numpy as np

import relaybf as rb

cfg = rb.make_config(
    kind="distributed", n_relays=4, group_sizes=[2, 2], tx_power=1.0,
    relay_noise=0.25, user_noise=0.25, total_budget=10.0,
)
ch = rb.sample_channels(cfg, seed=5)
forms = rb.build_forms(cfg, ch)

sol = rb.bisect_sdr(forms, rb.R2)
rep = rb.randomize_r2(forms, sol, n_trials=300, seed=0)
w1, w2 = rep.best.w1, rep.best.w2
analytic = rb.sinr_per_user(forms, w1, w2)

res = rb.simulate_bfa(
    cfg, ch,
    rb.weights_matrix(cfg, w1), rb.weights_matrix(cfg, w2),
    n_sym_pairs=200_000, seed=1,
)
print("user   analytic   empirical   rel.err     BER")
for u in range(cfg.n_users):
    err = abs(res.sinr[u] - analytic[u]) / analytic[u]
    print(f"{u:4d}   {analytic[u]:8.4f}   {res.sinr[u]:9.4f}   {err:7.4f}   {res.ber[u]:.4f}")
print(f"mean relay transmit power {res.relay_power:.3f} "
      f"(budget {cfg.total_budget:.3f})")

# More transmit power, better BER: scale the beamformer down and watch the
# error rate climb.  (Use a single-beamformer design here; one component of
# the pair on its own may leave some user in a null.)
print("\npower sweep (single-beamformer chain):")
w = rb.randomize_r1(forms, rb.bisect_sdr(forms, rb.R1), n_trials=300, seed=0).best.w1
for scale in (0.1, 0.3, 1.0):
    r = rb.simulate_bf(cfg, ch, rb.weights_matrix(cfg, scale * w), 100_000, 2)
    print(f"  scale {scale:4.1f}: worst SINR {np.min(r.sinr):7.4f}, "
          f"mean BER {np.mean(r.ber):.4f}")
