# debug_logging.py
import logging
import os
from datetime import datetime

import colorlog

from utils import format_seconds

PLAIN_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
COLOR_FORMAT = '%(log_color)s%(asctime)s - %(levelname)s%(reset)s - %(message)s'
MAX_LOGGED_WITNESSES = 10


def get_run_logger(name="injekt", log_dir=None, level=None):
    """
    Set up and return the logger every injekt module logs through.

    Module loggers are created with logging.getLogger(__name__) and have no
    handlers of their own; this attaches a colored console handler and, when
    `log_dir` is given, a timestamped debug file to the root logger once.
    """
    logger = logging.getLogger(name)
    root = logging.getLogger()

    # Already configured: repeated calls must not duplicate output lines
    if getattr(root, "_injekt_configured", False):
        return logger

    root.setLevel(logging.DEBUG)
    console_level = getattr(logging, (level or "INFO").upper(), logging.INFO)

    console_handler = colorlog.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(colorlog.ColoredFormatter(
        COLOR_FORMAT,
        log_colors={
            "DEBUG": "cyan",
            "INFO": "green",
            "WARNING": "yellow",
            "ERROR": "red",
            "CRITICAL": "bold_red",
        },
    ))
    root.addHandler(console_handler)

    log_file = None
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        log_file = os.path.join(log_dir, f'injekt_{timestamp}.log')
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(PLAIN_FORMAT))
        root.addHandler(file_handler)

    root._injekt_configured = True
    if log_file:
        logger.info(f"Logging initialised, writing to {log_file}")
    return logger


def log_report_summary(logger, report):
    """
    Log a summary block for a verification report (a report object or its JSON dict).
    """
    data = report.to_json() if hasattr(report, "to_json") else dict(report)
    label = data.get('label') or data.get('claim') or 'Run'
    logger.info(f"======== {label} Summary ========")
    logger.info(f"Trials: {data.get('trials', 'N/A')}, seed: {data.get('seed', 'N/A')}")
    if data.get('strata'):
        logger.info(f"Strata: {', '.join(data['strata'])}")

    witness_lists = [
        (key, data[key]) for key in (
            'collisions', 'base_locus_hits', 'roundtrip_failures', 'equivariance_failures',
            'violations', 'separation_violations', 'invariance_violations', 'discrepancies',
        ) if isinstance(data.get(key), list)
    ]
    for key, items in witness_lists:
        logger.info(f"{key.replace('_', ' ').capitalize()}: {len(items)}")
    if data.get('evidence'):
        logger.info(f"Evidence: {data['evidence']}")
    if data.get('elapsed') is not None:
        logger.info(f"Elapsed: {format_seconds(data['elapsed'])}")

    shown = 0
    for key, items in witness_lists:
        for item in items:
            if shown >= MAX_LOGGED_WITNESSES:
                break
            logger.info(f"{key} witness {shown + 1}: {item}")
            shown += 1

    for note in data.get('notes', []):
        logger.info(f"Note: {note}")
    logger.info(f"Clean: {data.get('clean', 'N/A')}")
    logger.info("=====================================")
