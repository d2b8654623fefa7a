"""
Logging setup for groupoid-cocycles.
"""

import logging
import sys
from datetime import datetime

from pythonjsonlogger import jsonlogger

LOGGING_JSON_INDENT = 2
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


class CustomJsonFormatter(jsonlogger.JsonFormatter):

    """
    Json formatter with a timestamp, an upper case level and the source
    location of each record.
    """

    def add_fields(self, log_record, record, message_dict):
        """
        Add timestamp, level and location fields.
        """
        super().add_fields(log_record, record, message_dict)
        log_record.setdefault(
            "timestamp",
            datetime.utcfromtimestamp(record.created).strftime(TIMESTAMP_FORMAT),
        )
        log_record["level"] = str(log_record.get("level") or record.levelname).upper()
        log_record.setdefault("module", record.module)
        log_record.setdefault("linenumber", record.lineno)
        log_record.setdefault("pathname", record.pathname)


def setup_module_logging(
    logging_level_int: int = logging.WARNING,
    json_indent: int = LOGGING_JSON_INDENT,
) -> logging.Handler:
    """
    Set up logging level and format as JSON.

    Default level is WARNING. Logs are output to stderr. Handlers installed
    by earlier calls are replaced so that repeated command invocations in
    one process do not write to stale streams.
    """
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if isinstance(handler.formatter, CustomJsonFormatter):
            root_logger.removeHandler(handler)

    stderr_handler = logging.StreamHandler(sys.stderr)
    formatter = CustomJsonFormatter(json_indent=json_indent)
    stderr_handler.setFormatter(formatter)
    stderr_handler.setLevel(logging_level_int)
    root_logger.addHandler(stderr_handler)
    root_logger.setLevel(logging_level_int)
    logging.info(
        "Set up logging level.", extra=dict(logging_level_int=logging_level_int)
    )
    return stderr_handler
