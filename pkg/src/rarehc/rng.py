"""Counter-based substreams derived from one master seed.

Every random quantity in a run is drawn from a generator keyed by
``(master_seed, stream, cell, replicate)``.  The key alone fixes the
stream, so results do not depend on the order or process in which
replicates are evaluated.
"""

import numpy as np

# stream tags; never renumber, outputs are keyed on them
CALIBRATION = 1
NULL = 2
ALTERNATIVE = 3
COUPLING = 4
SPACING = 5
ROWS_NULL = 6
ROWS_ALT = 7
AGG_NULL = 8
AGG_ALT = 9
AGG_CALIBRATION = 10
ROWS_CALIBRATION = 11


def substream_seed(master_seed, *key):
    """64-bit seed for the substream identified by ``key``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def substream(master_seed, *key):
    return np.random.default_rng(substream_seed(master_seed, *key))
