import json

import pytest

from qchar_project import cli
from qchar_project.runners import verify_runner


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


class TestCli:
    def test_qchar_json(self, capsys):
        code, out = run(capsys, "qchar", "Psi[0]^-1", "--window=-4:0", "--degcap", "2")
        assert code == 0
        data = json.loads(out.out)
        assert data["command"] == "qchar"
        assert data["schema"] == 1
        assert len(data["series"]["terms"]) == 7

    def test_text_format(self, capsys):
        code, out = run(capsys, "qchar", "Y[-1]", "--format", "text")
        assert code == 0
        assert "command: qchar" in out.out.splitlines()

    def test_text_series_table(self, capsys):
        code, out = run(capsys, "qchar", "Psi[0]^-1", "--window=-4:0", "--degcap", "2", "--format", "text")
        assert code == 0
        lines = out.out.splitlines()
        table = lines[lines.index("series:") + 1:]
        assert len(table) == 7
        assert all(line.startswith("    ") for line in table)
        assert [int(line.split()[0]) for line in table] == [0, 1, 1, 1, 2, 2, 2]
        assert table[0].split()[-1] == "1"
        assert '"terms"' not in out.out

    def test_text_summands(self, capsys):
        code, out = run(capsys, "decompose", "--window=-4:0", "--degcap", "2", "--format", "text")
        assert code == 0
        headers = [line for line in out.out.splitlines() if line.startswith("summands[")]
        assert len(headers) == 3
        assert "tuple=[1]" in headers[1]

    def test_verify_passes(self, capsys):
        code, out = run(capsys, "verify", "divergence", "--N", "2")
        assert code == 0
        assert json.loads(out.out)["passed"]

    def test_verify_failure_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(verify_runner, "linear_oracle_check", lambda D: False)
        code, out = run(capsys, "verify", "oracle", "--D", "2")
        assert code == 1
        assert not json.loads(out.out)["passed"]

    def test_simulate_specialized(self, capsys):
        code, out = run(capsys, "simulate", "1:-1,1:-3", "--q", "2,3")
        assert code == 0
        assert json.loads(out.out)["dimension"] == 4

    def test_computation_error(self, capsys):
        code, out = run(capsys, "qchar", "Y[2]")
        assert code == 2
        assert "qchar: error:" in out.err
        assert out.out == ""

    @pytest.mark.parametrize(
        "argv",
        [
            ["qchar", "Y[-1]", "--window=0:-4"],
            ["qchar", "Y[-1]", "--q", "1,2"],
            ["qchar", "Y[-1]", "--window", "bad"],
        ],
    )
    def test_config_errors(self, capsys, argv):
        code, _ = run(capsys, *argv)
        assert code == 2

    def test_window_as_separate_argument(self, capsys):
        code, out = run(capsys, "verify", "decomp", "--window", "-8:0", "--degcap", "4")
        assert code == 0
        assert json.loads(out.out)["passed"]

    def test_trivial_and_rejected_inputs(self, capsys):
        code, out = run(capsys, "qchar", "Psi[0]^-1", "--degcap", "0")
        assert code == 0
        assert [t["monomial"] for t in json.loads(out.out)["series"]["terms"]] == ["1"]
        code, out = run(capsys, "qchar", "Psi[0]^1")
        assert code == 2
        code, out = run(capsys, "simulate", "")
        assert code == 2

    def test_simulate_rows(self, capsys):
        code, out = run(capsys, "simulate", "1:-1")
        assert len(json.loads(out.out)["rows"]) == 2
        code, out = run(capsys, "simulate", "1:-1,1:-3,1:-5", "--normalized")
        assert len(json.loads(out.out)["rows"]) == 8

    def test_deterministic_output(self, capsys):
        _, first = run(capsys, "decompose", "--window=-6:0", "--degcap", "3")
        _, second = run(capsys, "decompose", "--window=-6:0", "--degcap", "3")
        assert first.out == second.out

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["frobnicate"])
        assert info.value.code == 2

    def test_build_message(self):
        args = cli.build_parser().parse_args(["induce", "--r", "1", "--r", "2"])
        assert cli.build_message(args) == {"action": "induce", "D": 4, "positions": 3, "rset": [1, 2]}
        args = cli.build_parser().parse_args(["verify", "oracle", "--D", "3"])
        assert cli.build_message(args) == {"action": "verify", "target": "oracle", "D": 3}
