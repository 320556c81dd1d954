"""Global cap on enumeration sizes, overridable via COCYCLELAB_BUDGET."""

import os

DEFAULT_BUDGET = 1_000_000


def enumeration_budget(override=None):
    """Resolve the active enumeration cap (explicit arg > env var > default)."""
    if override is not None:
        return int(override)
    env = os.environ.get("COCYCLELAB_BUDGET")
    if env:
        return int(env)
    return DEFAULT_BUDGET
