# # Random walks in a reflecting labyrinth
#
# Each site is a random-walk point, a crossing or a mirror. At random-walk
# points the walker picks a fresh direction. Elsewhere it is deflected
# deterministically. Time is counted in visits to random-walk points.

# In[1]:

import numpy as np

from perclab.labyrinth import (
    equivalence_class,
    msd_curve,
    msd_in_env,
    replay_backwards,
    run_walk,
    sample_environment,
    trap_environment,
)

# With only random-walk points the mean squared displacement grows like n.

# In[2]:

srw = msd_curve(1.0, 0.0, None, (128, 128), 500, 20, seed=1, walkers_per_env=100, periodic=True)
print("slope", round(srw.delta_hat, 3), " MSD at n=500:", round(srw.msd[500], 1))

# A few crossings and mirrors change the constant but not the diffusive shape.

# In[3]:

mix = msd_curve(0.95, 0.05, None, (128, 128), 500, 20, seed=2, walkers_per_env=100, periodic=True)
ratio = mix.msd_over_n()
print("slope", round(mix.delta_hat, 3), " MSD/n at 100, 250, 500:", np.round(ratio[[100, 250, 500]], 3))

# A point walled in by reversing mirrors never leaves.

# In[4]:

trap = trap_environment()
print("class:", sorted(equivalence_class(trap, (1, 1), 10).points))
print("max MSD:", np.nanmax(msd_in_env(trap, 200, 10, seed=3).msd))

# Reversing the final heading and replaying retraces the walk exactly.

# In[5]:

env = sample_environment((20, 20), 0.3, 0.2, None, seed=4)
start = tuple(env.rw_points()[0])
walk = run_walk(env, start, 80, seed=5)
print("retraced:", replay_backwards(env, walk) == walk.path[::-1])
