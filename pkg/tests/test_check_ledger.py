import pytest

from qchar_project.knowledge import CheckLedger


class TestCheckLedger:
    @pytest.fixture
    def ledger(self):
        return CheckLedger()

    def test_initialization(self, ledger):
        assert ledger.history() == []
        assert ledger.summary() == {"total": 0, "passed": 0, "failed": [], "all_passed": True}

    def test_record_and_query(self, ledger):
        event = ledger.record("oracle", "pbw-basis", True, {"D": 4})
        assert event == {"name": "oracle", "anchor": "pbw-basis", "passed": True, "details": {"D": 4}}
        assert ledger.query("oracle") is True
        assert ledger.query_details("oracle") == {"D": 4}
        assert ledger.query("missing") is None
        assert ledger.query_details("missing") == {}

    def test_latest_verdict_wins(self, ledger):
        ledger.record("stability", "coproduct-stability", False)
        ledger.record("stability", "coproduct-stability", True)
        assert ledger.query("stability") is True
        assert len(ledger.history()) == 2

    def test_summary(self, ledger):
        ledger.record("decomposition", "decomposition-theorem", True)
        ledger.record("induced", "induced-lweights-in-1xT", False)
        summary = ledger.summary()
        assert summary["total"] == 2
        assert summary["passed"] == 1
        assert summary["failed"] == ["induced"]
        assert not summary["all_passed"]
