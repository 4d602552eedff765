from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    "MATCHING_DEFAULT_ALPHA": 5,
    "MATCHING_DEFAULT_REDUCTION": "double",
    "MATCHING_CHECK_INVARIANTS": False,
    "MATCHING_ORACLE_MAX_SIDE": 9,
    "MATCHING_BENCH_TIME_LIMIT": 60.0,
}


def matching_setting(name):
    """Read a MATCHING_* setting, falling back to the built-in default.

    Works outside a configured Django project (plain library use), where
    the defaults apply.
    """
    default = DEFAULTS[name]
    try:
        return getattr(settings, name, default)
    except ImproperlyConfigured:
        return default


def invariants_enabled(flag=None) -> bool:
    if flag is not None:
        return bool(flag)
    return bool(matching_setting("MATCHING_CHECK_INVARIANTS"))
