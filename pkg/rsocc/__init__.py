from rsocc.config import Config
from rsocc.rich_logging import setup_rich_logging

__version__ = "0.1.0"
version_info = tuple(__version__.split(".")[:3])


def get_config(extra_sources=(), overrides=None):
    """Load the configuration and set up logging the way it asks for."""
    config = Config(extra_sources=extra_sources, overrides=overrides)
    if config.getboolean("rich_logging", True):
        setup_rich_logging(level=config.get("log_level", "INFO").upper())
    return config


__all__ = ["Config", "__version__", "get_config"]
