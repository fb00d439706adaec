#!/usr/bin/env python3
"""Three closed loops, three admissibility verdicts.

A gain is admissible when the nominal start tau0 AND every offset direction
e_j stay inside the band forever: by linearity that decides every disturbed
start x0 = alpha * tau0 + beta at once.
"""

import numpy as np

from gaincap import Gain, SystemSpec, check_gain

plant = dict(
    a=[[0.9, 0.0], [0.6, 0.3]],
    b=[[-1.5, 2.0], [1.0, -3.0]],
    c=[[1.0, 1.0]],
)


def show(title, report):
    print(title)
    print("  admissible:", report.admissible)
    print("  nominal start tolerable:", report.alpha_tolerable)
    for bv in report.beta_violations:
        print(
            f"  offset e{bv.index} breaks the band at step "
            f"{bv.first_violation_step} (magnitude {bv.magnitude:.4f})"
        )
    cap = report.capacity
    print(f"  capacity set: {cap.status}, k0 = {cap.k0}")
    print()


# A well-damped loop keeps everything inside.
sys_ = SystemSpec(**plant, tau0=[0.3, 0.5], epsilon=np.sqrt(2.0))
show("damped loop:", check_gain(sys_, Gain([[0.32, 0.16], [0.24, 0.12]])))

# A slower loop still tolerates tau0, but amplifies the first basis
# direction past the band: beta disturbances along e1 are not tolerated.
show("sluggish loop:", check_gain(sys_, a_tilde=[[0.9, 0.0], [0.99, 0.6]]))

# With a marginally stable loop and a larger nominal start, tau0 itself
# leaves the band at step 0: alpha disturbances are the problem.
sys_big = SystemSpec(**plant, tau0=[0.6, 1.0], epsilon=np.sqrt(2.0))
show("marginal loop, large start:", check_gain(sys_big, a_tilde=[[1.0, 0.0], [0.5, -0.1]]))
