import pytest

from qchar_project.config import settings
from qchar_project.config.settings import RunConfig
from qchar_project.runners.compute_runner import ComputeRunner, parse_factors


class TestComputeRunner:
    @pytest.fixture
    def runner(self):
        return ComputeRunner(config=RunConfig(window=(-4, 0), degcap=2, depth=1))

    def test_initialization(self, runner):
        assert runner.name == "compute_runner"
        assert runner.role == "Character computation"
        assert runner.get_status() == "standby"

    def test_status_update(self, runner):
        response = runner.update_status("computing")
        assert response == {"status": "updated", "new_status": "computing"}
        assert runner.get_status() == "computing"

    def test_qchar(self, runner):
        response = runner.process_request({"action": "qchar", "expr": "Psi[0]^-1"})
        assert response["schema"] == 1
        assert response["command"] == "qchar"
        assert len(response["series"]["terms"]) == 7

    def test_limit_of_prefundamental(self, runner):
        response = runner.process_request({"action": "limit", "expr": "Psi[0]^-1"})
        assert response["n0"] == 3
        assert response["matches_closed_form"]

    def test_limit_of_finite_type(self, runner):
        response = runner.process_request({"action": "limit", "expr": "Y[-1]*Y[-3]"})
        assert response["n0"] == 1
        assert response["matches_closed_form"]

    def test_decompose(self, runner):
        response = runner.process_request({"action": "decompose", "r": 0})
        assert [s["tuple"] for s in response["summands"]] == [[], [1], [2]]
        assert response["summands"][1]["weight_shift"] == 0

    def test_simulate(self, runner):
        response = runner.process_request({"action": "simulate", "factors": "1:-1, 1:-3"})
        assert response["dimension"] == 4
        assert sum(row["multiplicity"] for row in response["rows"]) == 4

    def test_simulate_falls_back_to_specialization(self, runner, monkeypatch):
        symbolic = runner.process_request({"action": "simulate", "factors": "1:-1, 1:-3"})
        monkeypatch.setattr(settings, "SYMBOLIC_DIM_LIMIT", 2)
        specialized = runner.process_request({"action": "simulate", "factors": "1:-1, 1:-3"})
        assert specialized["rows"] == symbolic["rows"]

    def test_induce_and_basis(self, runner):
        response = runner.process_request({"action": "induce", "D": 3, "positions": 2, "rset": [1]})
        assert response["passed"]
        response = runner.process_request({"action": "basis", "positions": 3, "rmax": 2})
        assert response["command"] == "basis"
        assert [b["size"] for b in response["blocks"]] == [0, 1]

    def test_errors(self, runner):
        response = runner.process_request({"action": "qchar", "expr": "Y[2]"})
        assert response["error"].startswith("Error processing request:")
        assert response["error_type"] == "ParseError"
        response = runner.process_request({"action": "simulate", "factors": "1-1"})
        assert response["error_type"] == "ValueError"

    def test_unknown_action(self, runner):
        response = runner.process_request({"action": "fly"})
        assert response == {"error": "Unknown action requested.", "requested_action": "fly"}


def test_parse_factors():
    assert parse_factors("1:-1, 2:-5, [3]") == [(1, -1), (2, -5), ("w", 3)]
    assert parse_factors("") == []
