from configparser import ConfigParser, MissingSectionHeaderError, NoOptionError, NoSectionError
import os
from pathlib import Path
from pkgutil import get_data

from rsocc.exceptions import ConfigError, UnknownOptionError


class Config:
    """A ConfigParser wrapper to support defaults when calling instance
    methods, and also tied to a single section"""

    SECTION = "rsocc"

    def __init__(self, values=None, extra_sources=(), overrides=None):
        self.cp = ConfigParser()
        self.cp.read_string(get_data(__package__, "default_rsocc.conf").decode())
        self.known = frozenset(self.cp.options(self.SECTION))
        if values is None:
            sources = [
                "/etc/rsocc/rsocc.conf",
                "rsocc.conf",
                Path.home() / ".rsocc.conf",
            ]
            if "RSOCC_CONFIG" in os.environ:
                sources.append(os.environ["RSOCC_CONFIG"])
            sources.extend(extra_sources)
            for source in sources:
                self.read(source)
        else:
            self.update(values)
        if overrides:
            self.update(overrides)

    def read(self, source):
        """Read a flat ``key = value`` file, with or without a ``[rsocc]`` header. Missing files are skipped."""
        path = Path(source)
        if not path.is_file():
            return
        text = path.read_text()
        parser = ConfigParser()
        try:
            parser.read_string(text, source=str(path))
        except MissingSectionHeaderError:
            parser.read_string(f"[{self.SECTION}]\n{text}", source=str(path))
        if parser.has_section(self.SECTION):
            self.update(dict(parser.items(self.SECTION)))

    def update(self, values):
        for key, value in values.items():
            if key not in self.known:
                raise UnknownOptionError(key)
            self.cp.set(self.SECTION, key, str(value))

    def get(self, option, default=None):
        return self._get(self.cp.get, option, default)

    def getint(self, option, default=None):
        return self._get(self.cp.getint, option, default)

    def getfloat(self, option, default=None):
        return self._get(self.cp.getfloat, option, default)

    def getboolean(self, option, default=None):
        return self._get(self.cp.getboolean, option, default)

    def getlist(self, option, default=None, type=str):  # noqa: A002
        raw = self.get(option, default="")
        if not raw.strip():
            return [] if default is None else default
        try:
            return [type(item.strip()) for item in raw.split(",") if item.strip()]
        except ValueError as e:
            raise ConfigError(f"{option} is invalid: {e}") from e

    def _get(self, method, option, default):
        try:
            return method(self.SECTION, option)
        except (NoSectionError, NoOptionError):
            if default is not None:
                return default
            raise
        except ValueError as e:
            raise ConfigError(f"{option} is invalid: {e}") from e

    def items(self):
        return dict(self.cp.items(self.SECTION))
