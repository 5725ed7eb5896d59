import logging

from debug_logging import MAX_LOGGED_WITNESSES, log_report_summary
from morphism import collision_search


def test_summary_caps_logged_witnesses(caplog):
    logger = logging.getLogger("injekt.summary")
    report = {
        "label": "squares",
        "trials": 40,
        "seed": 0,
        "collisions": [{"trial": i} for i in range(12)],
        "base_locus_hits": [],
        "notes": ["sampled only"],
        "clean": False,
        "elapsed": 0.25,
    }
    with caplog.at_level(logging.INFO):
        log_report_summary(logger, report)
    assert "======== squares Summary ========" in caplog.text
    assert "Collisions: 12" in caplog.text
    assert "Base locus hits: 0" in caplog.text
    assert caplog.text.count("collisions witness") == MAX_LOGGED_WITNESSES
    assert "Elapsed: 250 ms" in caplog.text
    assert "Note: sampled only" in caplog.text
    assert "Clean: False" in caplog.text


def test_summary_accepts_report_objects(caplog, square_map):
    report = collision_search(square_map, trials=12, seed=0)
    with caplog.at_level(logging.INFO):
        log_report_summary(logging.getLogger("injekt.summary"), report)
    assert "Trials: 12" in caplog.text
