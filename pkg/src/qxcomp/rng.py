"""Counter-based random streams for reproducible Monte Carlo.

Trials are partitioned into fixed-size blocks. Block ``b`` of a run with
seed ``s`` draws from ``Philox(key=s * 2**64 + b)``, so trial ``t`` always
sees the same substream (block ``t // BLOCK_SIZE``) no matter how blocks
are scheduled across workers.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exceptions import InputError

RNG_NAME = "philox4x64-10"
RNG_VERSION = 1
BLOCK_SIZE = 8192


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InputError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def block_generator(seed, block):
    """Generator for trial block ``block`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(key=check_seed(seed) * 2**64 + int(block)))


def derive_seed(seed, index):
    """Child seed for an independent cell ``index`` (e.g. a sweep grid cell)."""
    ss = np.random.SeedSequence([check_seed(seed), int(index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def blocks(trials):
    """Yield ``(block_index, size)`` pairs covering ``trials`` trials."""
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    n_full, rest = divmod(trials, BLOCK_SIZE)
    for b in range(n_full):
        yield b, BLOCK_SIZE
    if rest:
        yield n_full, rest


def count_hits(predicate, N, p, trials, seed, n_jobs=1):
    """Number of sampled sequences whose count vector satisfies ``predicate``.

    ``predicate`` maps a ``(k, D)`` count array to a boolean array of
    length ``k``. Blocks are evaluated independently, so the result is the
    same for every ``n_jobs``.
    """
    p = np.asarray(p, dtype=float)
    p = p / p.sum()

    def run(item):
        b, size = item
        counts = block_generator(seed, b).multinomial(N, p, size=size)
        return int(np.count_nonzero(predicate(counts)))

    work = list(blocks(trials))
    if n_jobs == 1 or len(work) == 1:
        return sum(run(w) for w in work)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return sum(pool.map(run, work))
