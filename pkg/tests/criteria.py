"""Pass/fail bookkeeping for the acceptance suite."""

import contextlib

RESULTS: dict = {}


@contextlib.contextmanager
def criterion(n: int, title: str):
    try:
        yield
    except BaseException as exc:
        RESULTS[n] = f"FAIL criterion {n}: {title} ({type(exc).__name__}: {exc})"
        print(RESULTS[n])
        raise
    RESULTS[n] = f"PASS criterion {n}: {title}"
    print(RESULTS[n])
