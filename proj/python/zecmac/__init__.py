import json

from ._core import CapError, ConfigError, Error, __version__, is_zero_error as _is_zero_error, run, topological_entropy
from . import _core


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def info(joint, x, y, given=()):
    return json.loads(_core.info(_text(joint), list(x), list(y), list(given)))


def region(mac, n=1, method="thm1", cap_u=None, cap_wmax=4, limit_n=4):
    return json.loads(_core.region(_text(mac), n, method, cap_u or 0, cap_wmax, limit_n))


def feasibility(h, points):
    return _core.feasibility([float(v) for v in h], _text(points))


def is_zero_error(code, mac):
    return _is_zero_error(_text(code), _text(mac))


__all__ = ["CapError", "ConfigError", "Error", "feasibility", "info", "is_zero_error", "region", "run",
           "topological_entropy", "__version__"]
