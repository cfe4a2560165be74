from zope.interface import implementer

from rsocc import sqlite
from rsocc.interfaces import IReportStorage


@implementer(IReportStorage)
class MemoryReportStorage:
    def __init__(self, config):
        self.records = []
        self.finished_to_keep = config.getint("finished_to_keep", 1000)

    def add(self, record):
        self.records.append(record)
        del self.records[: -self.finished_to_keep]  # keep last x finished runs

    def list(self):
        return list(self)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        yield from reversed(self.records)


@implementer(IReportStorage)
class SqliteReportStorage:
    def __init__(self, config):
        self.records = sqlite.initialize(sqlite.SqliteRunRecords, config, "reports", "run_reports")
        self.finished_to_keep = config.getint("finished_to_keep", 1000)

    def add(self, record):
        self.records.add(record)
        self.records.clear(self.finished_to_keep)

    def list(self):
        return list(self)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        yield from self.records
