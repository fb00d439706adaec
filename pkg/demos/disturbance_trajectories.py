#!/usr/bin/env python3
"""Trajectories from inside and outside the capacity set.

A start inside keeps every output component within the +/-epsilon band for
all time; a start outside is guaranteed to leave it at some step.  The
perturbation model is x0 = alpha * tau0 + beta.
"""

import numpy as np

from gaincap import Gain, SystemSpec, determine, membership, simulate

sys_ = SystemSpec(
    a=[[0.9, 0.0], [0.6, 0.3]],
    b=[[-1.5, 2.0], [1.0, -3.0]],
    c=[[1.0, 1.0]],
    tau0=[0.3, 0.5],
    epsilon=np.sqrt(2.0),
)
gain = Gain([[0.32, 0.16], [0.24, 0.12]])
cap = determine(sys_, gain)

STEPS = 12
RUNS = [
    ("nominal start (alpha=1, beta=0)", 1.0, np.zeros(2)),
    ("pushed along tau0 (alpha=2.2)", 2.2, np.zeros(2)),
    ("kicked sideways (beta = 1.4 * e2)", 1.0, np.array([0.0, 1.4])),
]

for title, alpha, beta in RUNS:
    x0 = alpha * np.asarray(sys_.tau0) + beta
    verdict = membership(cap, x0)
    traj = simulate(sys_, gain, alpha=alpha, beta=beta, steps=STEPS)
    peaks = np.abs(traj.outputs).max(axis=1)
    print(f"{title}: x0 = ({x0[0]:+.2f}, {x0[1]:+.2f})")
    print(f"  member of the capacity set: {verdict.member}")
    if verdict.violation is not None:
        v = verdict.violation
        print(f"  first violation at step {v.step}, magnitude {v.magnitude:.3f}")
    band = sys_.epsilon
    marks = "".join("." if p <= band + 1e-12 else "X" for p in peaks)
    print(f"  |y| vs band over steps 0..{STEPS}: {marks}  (X = outside)")
    print(f"  peak |y| = {peaks.max():.3f}, band = {band:.3f}")
    print()
