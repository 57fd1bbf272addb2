import logging
import csv
from datetime import datetime
from pathlib import Path
from Config import Config


LOGGER_NAME = 'tagdiff'

#one schema for pipeline steps and logged warnings
ACTIVITY_COLUMNS = ['Timestamp', 'Step', 'Status', 'Run', 'Seed', 'Lambdas', 'Details']


def _blank(value):
    return '' if value is None else value


def _append_activity(csv_path, row):
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    file_exists = csv_path.exists()
    with open(csv_path, "a", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        if not file_exists:
            writer.writerow(ACTIVITY_COLUMNS)
        writer.writerow(row)


class ActivityCSVHandler(logging.Handler):
    """
    Appends warnings to the activity CSV next to the pipeline steps.
    Run and seed come from the record's ``extra`` when a sweep logs them.
    """
    def __init__(self, csv_path, level=logging.WARNING):
        super().__init__(level)
        self.csv_path = Path(csv_path)
        self.csv_path.parent.mkdir(parents=True, exist_ok=True)

    def emit(self, record):
        try:
            _append_activity(self.csv_path, [
                datetime.now().isoformat(),
                record.levelname.title(),
                'logged',
                _blank(getattr(record, 'run', None)),
                _blank(getattr(record, 'seed', None)),
                '',
                self.format(record),
            ])
        except Exception:
            # logging errors must not break a sweep
            self.handleError(record)


def setup_logger():
    #setting up application logger, once per process
    logger = logging.getLogger(LOGGER_NAME)
    if logger.handlers:
        return logger

    Config.LOGS_DIR.mkdir(parents=True, exist_ok=True)
    logger.setLevel(getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO))
    logger.propagate = False

    #File handler
    fh = logging.FileHandler(Config.LOG_FILE, encoding='utf-8')
    fh.setLevel(logging.DEBUG)

    #Console handler
    ch = logging.StreamHandler()
    ch.setLevel(logging.INFO)

    #CSV activity handler, warnings and up only; runs go through log_activity
    csv_handler = ActivityCSVHandler(Config.ACTIVITY_LOG, level=logging.WARNING)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    fh.setFormatter(formatter)
    ch.setFormatter(formatter)
    csv_handler.setFormatter(logging.Formatter('%(message)s'))

    logger.addHandler(fh)
    logger.addHandler(ch)
    logger.addHandler(csv_handler)

    return logger


def log_activity(step, status, details='', run=None, seed=None, lambdas=None):
    #one pipeline step (ingest, split, run, sweep, report) as a CSV row
    _append_activity(Config.ACTIVITY_LOG, [
        datetime.now().isoformat(),
        step,
        status,
        _blank(run),
        _blank(seed),
        _blank(lambdas),
        details,
    ])


logger = setup_logger()
