#!/usr/bin/env python3
"""When is the fixpoint search guaranteed to stop?

Two sufficient conditions: the closed loop contracts in the max norm, or it
is controllable + observable with spectral radius below one.  Neither is
necessary — a marginally stable loop can still converge — and an expanding
mode visible in the output defeats the search entirely.
"""

import numpy as np

from gaincap import SystemSpec, analyze, determine

CASES = [
    (
        "contractive",
        dict(a=[[0.9, 0.0], [0.6, 0.3]], b=[[-1.5, 2.0], [1.0, -3.0]],
             c=[[1.0, 1.0]], tau0=[0.3, 0.5], epsilon=np.sqrt(2.0)),
        [[0.9, 0.0], [0.2, 0.1]],
        60,
    ),
    (
        "marginally stable (radius exactly 1)",
        dict(a=[[0.9, 0.0], [0.6, 0.3]], b=[[-1.5, 2.0], [1.0, -3.0]],
             c=[[1.0, 1.0]], tau0=[0.3, 0.5], epsilon=np.sqrt(2.0)),
        [[1.0, 0.0], [0.5, -0.1]],
        60,
    ),
    (
        "expanding mode visible in the output",
        dict(a=np.eye(2).tolist(), b=None, c=[[1.0, 0.0]],
             tau0=[0.1, 0.1], epsilon=1.0),
        [[2.0, 0.0], [0.0, 0.5]],
        30,
    ),
]

for title, plant, a_tilde, cap_iters in CASES:
    sys_ = SystemSpec(**plant)
    rep = analyze(sys_, a_tilde=a_tilde)
    cap = determine(sys_, a_tilde=a_tilde, max_iter=cap_iters)
    print(title)
    print(f"  spectral radius {rep.spectral_radius:.3f}, induced max-norm {rep.inf_norm:.3f}")
    print(f"  norm guarantee: {rep.norm_guarantee}, structural guarantee: {rep.structural_guarantee}")
    if rep.decay_index is not None:
        print(f"  output rows fit the band from step {rep.decay_index} on")
    outcome = f"k0 = {cap.k0}" if cap.k0 is not None else f"no fixpoint in {cap_iters} steps"
    print(f"  search outcome: {cap.status} ({outcome})")
    print()
