"""Climbing down the staircase with a width-matched ellipse proposal.

The staircase target stacks rectangles that shrink by a factor of three
per level.  A proposal drawn uniformly from an ellipse whose horizontal
semi-axis matches the local level width can always reach the level
below, and the exact hemisphere-overlap geometry guarantees a uniform
chance of descending.  Started ten levels up, the chain falls to the
bottom in a few dozen steps and then mixes there.
"""

import numpy as np

from pdrwm import ellipse_proposal, make_rectangle, rectangle_v, run_chain

SEED = 4

rect = make_rectangle()
traj = run_chain(rect, ellipse_proposal(), (0.0, 10.5), 50_000, SEED)
levels = np.floor(traj.states[:, 1]).astype(int)

first_hit = int(np.argmax(levels == 1))
print(f"start level 10, acceptance rate {traj.acceptance_rate:.3f}")
print(f"first visit to level 1 at step {first_hit}")

V = rectangle_v()
second_half = traj.states[traj.n_steps // 2 :]
print(f"mean V over the last half: {np.mean([V.evaluate(s) for s in second_half]):.3f}")

print()
print("occupation of the last half by level (target mass is 8/9, 8/81, ...):")
tail_levels = levels[traj.n_steps // 2 :]
for k in range(1, 6):
    frac = float(np.mean(tail_levels == k))
    print(f"  level {k}: {frac:7.4f}   target {8 / 9 ** k:.4f}")
