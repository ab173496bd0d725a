"""Python bindings for the pirrht planner and path-integral controller."""

from ._core import *  # noqa: F401,F403

RUN_TAG = 0x72756E


def run_seed(root: int, index: int) -> int:
    """Seed the command-line tool uses for run number `index`."""
    from ._core import derive_seed

    return derive_seed(root, RUN_TAG, index)
