import threading
from fractions import Fraction

import pytest

from exactalg import InjektError
from utils import (chunk_ranges, format_seconds, format_vector, parse_int_list, parse_scalar_list, run_partitioned,
                   trial_rng)


def test_trial_rng_depends_on_every_key():
    draws = {
        (seed, stream, index): trial_rng(seed, stream, index).random()
        for seed in (0, 1) for stream in ("collision", "roundtrip") for index in (0, 1)
    }
    assert len(set(draws.values())) == len(draws)
    assert trial_rng(5, "collision", 3).random() == trial_rng(5, "collision", 3).random()


@pytest.mark.parametrize("total, workers", [(10, 1), (10, 3), (3, 8), (0, 4), (1000, 7)])
def test_chunk_ranges_cover_range_in_order(total, workers):
    chunks = chunk_ranges(total, workers)
    assert chunks[0][0] == 0 and chunks[-1][1] == total
    assert all(a[1] == b[0] for a, b in zip(chunks, chunks[1:]))
    assert len(chunks) <= max(1, workers)


def test_run_partitioned_is_independent_of_worker_count():
    def draw(start, stop):
        return [trial_rng(9, "test", i).randint(0, 10 ** 6) for i in range(start, stop)]

    serial = [x for chunk in run_partitioned(draw, 50, workers=1) for x in chunk]
    threaded = [x for chunk in run_partitioned(draw, 50, workers=4) for x in chunk]
    assert serial == threaded


def test_parsers():
    assert parse_int_list("1,6,10,15") == (1, 6, 10, 15)
    assert parse_int_list(None) is None
    with pytest.raises(InjektError):
        parse_int_list("1,a")
    assert parse_scalar_list("1, 0,-1/2") == [1, 0, Fraction(-1, 2)]
    with pytest.raises(InjektError):
        parse_scalar_list("1/0")


def test_formatting():
    assert format_vector([1, 0, 2]) == "[1:0:2]"
    assert format_seconds(0.25) == "250 ms"
    assert format_seconds(3) == "3.00 s"


def test_run_partitioned_caps_chunks_at_the_trial_count():
    calls = []

    def record(start, stop):
        calls.append((start, stop, threading.get_ident()))
        return stop - start

    assert run_partitioned(record, 3, workers=8) == [1, 1, 1]
    assert sorted(c[:2] for c in calls) == [(0, 1), (1, 2), (2, 3)]
    calls.clear()
    assert run_partitioned(record, 5, workers=1) == [5]
    assert calls == [(0, 5, threading.get_ident())]
