"""Runtime configuration knobs."""
from __future__ import annotations

import os

from .errors import ConfigError

THREADS_ENV = "MERCERKIT_THREADS"


def thread_count() -> int:
    """Upper bound for internal parallel loops.

    Read from the MERCERKIT_THREADS environment variable; defaults to the
    number of available cores.  The setting never changes results, only how
    much work may run concurrently.
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if count < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return count
