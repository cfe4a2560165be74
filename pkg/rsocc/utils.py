import multiprocessing
from importlib import import_module

from rsocc.exceptions import ConfigError


def load_object(path):
    """Load an object given its absolute object path, like ``rsocc.reportstorage.MemoryReportStorage``."""
    module, _, name = path.rpartition(".")
    try:
        return getattr(import_module(module), name)
    except (ImportError, AttributeError, ValueError) as e:
        raise ConfigError(f"can't load {path!r}: {e}") from e


def initialize_component(config, setting, default, *args):
    path = config.get(setting, default)
    cls = load_object(path)
    return cls(config, *args)


def get_max_proc(config):
    max_proc = config.getint("max_proc", 0)
    if max_proc:
        return max_proc

    try:
        cpus = multiprocessing.cpu_count()
    except NotImplementedError:
        cpus = 1
    return cpus * config.getint("max_proc_per_cpu", 1)
