import pytest
from zope.interface.verify import verifyObject

from rsocc.config import Config
from rsocc.interfaces import IReportStorage
from rsocc.reportstorage import MemoryReportStorage, SqliteReportStorage
from rsocc.sqlite import SqliteRunRecords
from rsocc.utils import initialize_component

pytestmark = pytest.mark.unit

record1 = {"grid_index": 0, "seed": 0, "method": "ASM", "status": "ok", "ber": "0.0"}
record2 = {"grid_index": 0, "seed": 0, "method": "CR", "status": "ok", "ber": "0.1"}
record3 = {"grid_index": 1, "seed": 0, "method": "ASM", "status": "HeaderNotFoundError", "ber": "0.5"}


def config(tmp_path):
    return Config(values={"reports_db": str(tmp_path), "finished_to_keep": "2"})


@pytest.mark.parametrize("cls", [SqliteReportStorage, MemoryReportStorage], ids=["sqlite", "memory"])
class TestReportStorage:
    def test_interface(self, cls, tmp_path):
        verifyObject(IReportStorage, cls(config(tmp_path)))

    def test_add(self, cls, tmp_path):
        storage = cls(config(tmp_path))

        assert len(storage) == 0

        storage.add(record1)
        storage.add(record2)
        storage.add(record3)
        actual = storage.list()

        assert len(storage) == 2
        assert actual == list(storage)
        assert actual == [record3, record2]

    def test_iter(self, cls, tmp_path):
        storage = cls(config(tmp_path))
        storage.add(record1)
        storage.add(record2)

        assert list(storage) == [record2, record1]


def test_sqlite_file(tmp_path):
    storage = SqliteReportStorage(config(tmp_path))
    storage.add(record1)

    assert (tmp_path / "reports.db").exists()


def test_sqlite_memory():
    storage = SqliteReportStorage(Config(values={"reports_db": ":memory:"}))
    storage.add(record1)

    assert storage.list() == [record1]


def test_run_records_columns():
    records = SqliteRunRecords(":memory:")
    records.add(record3)

    row = records.conn.execute("SELECT grid_index, seed, method, status, ber FROM run_reports").fetchone()
    assert row == (1, 0, "ASM", "HeaderNotFoundError", 0.5)


def test_run_records_clear():
    records = SqliteRunRecords(":memory:")
    for record in (record1, record2, record3):
        records.add(record)

    records.clear(1)
    assert list(records) == [record3]

    records.clear()
    assert len(records) == 0


def test_initialize_component():
    storage = initialize_component(
        Config(values={"reportstorage": "rsocc.reportstorage.SqliteReportStorage"}),
        "reportstorage",
        "rsocc.reportstorage.MemoryReportStorage",
    )

    assert isinstance(storage, SqliteReportStorage)
