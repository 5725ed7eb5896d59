# utils.py
import hashlib
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from exactalg import InjektError, scalar_to_json

logger = logging.getLogger(__name__)


def trial_rng(seed, stream, index):
    """
    Counter-based generator for trial `index` of a named stream.

    Args:
        seed (int): run seed
        stream (str): name of the consumer, e.g. "collision"
        index (int): trial number

    Returns:
        random.Random: seeded from a BLAKE2b digest of (seed, stream, index)
    """
    digest = hashlib.blake2b(f"{seed}:{stream}:{index}".encode("utf-8"), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))


def chunk_ranges(total, workers):
    """Split range(total) into at most `workers` contiguous (start, stop) chunks."""
    workers = max(1, min(workers, total)) if total else 1
    size, extra = divmod(total, workers)
    chunks, start = [], 0
    for w in range(workers):
        stop = start + size + (1 if w < extra else 0)
        chunks.append((start, stop))
        start = stop
    return chunks


def run_partitioned(fn, trials, workers=1):
    """Run fn(start, stop) over contiguous chunks; results come back in chunk order.

    `workers` caps the number of concurrent chunks. The trial loops are pure Python and hold the GIL,
    so more workers do not make a run faster; they only change how it is scheduled, never its result.
    """
    chunks = chunk_ranges(trials, workers)
    if len(chunks) == 1:
        return [fn(*chunks[0])]
    logger.debug(f"Running {trials} trials in {len(chunks)} chunks")
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def parse_int_list(text):
    """Parse "1,6,10,15" into a tuple of ints."""
    if text is None:
        return None
    try:
        return tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise InjektError(f"expected comma-separated integers, got {text!r}") from exc


def parse_scalar_list(text):
    """Parse "1,0,-1/2" into Fractions."""
    try:
        return [Fraction(part.strip()) for part in str(text).split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InjektError(f"expected comma-separated rationals, got {text!r}") from exc


def format_vector(values):
    return "[" + ":".join(scalar_to_json(v) for v in values) + "]"


def format_seconds(seconds):
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    return f"{seconds:.2f} s"
