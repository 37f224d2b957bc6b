import csv
import io
import json
import math

import pytest

from jumpwave.cli import main, table_csv
from jumpwave.config import parse_config
from jumpwave.errors import ConfigError
from jumpwave.tables import TABLES, compute_sweep, compute_table


def _vanilla_config(**overrides):
    cfg = {
        "model": {
            "r": 0.08, "delta": 0.12, "sigma": 0.2, "lambda": 2.5,
            "jump": {"variant": "normal", "mu_j": 0.05, "sigma_j": 0.03},
        },
        "contract": {"side": "call", "strike": 100.0},
        "scenario": {"spots": [110.0], "maturities": [0.25],
                     "orders": [0, 1, 2, 3]},
    }
    cfg.update(overrides)
    return cfg


class TestConfigParsing:
    def test_valid_config_round_trips(self):
        cfg = parse_config(_vanilla_config())
        assert cfg.model.delta == 0.12
        assert cfg.side == "call"
        assert cfg.orders == (0, 1, 2, 3)

    def test_cost_of_carry_alias(self):
        raw = _vanilla_config()
        del raw["model"]["delta"]
        raw["model"]["b"] = -0.04
        cfg = parse_config(raw)
        assert cfg.model.delta == pytest.approx(0.12)

    def test_b_and_delta_are_mutually_exclusive(self):
        raw = _vanilla_config()
        raw["model"]["b"] = -0.04
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_neither_b_nor_delta_rejected(self):
        raw = _vanilla_config()
        del raw["model"]["delta"]
        with pytest.raises(ConfigError):
            parse_config(raw)

    @pytest.mark.parametrize("mutate", [
        lambda c: c.update({"extra": 1}),
        lambda c: c["model"].update({"vol": 0.2}),
        lambda c: c["contract"].update({"notional": 1}),
        lambda c: c["scenario"].update({"seeds": [1]}),
        lambda c: c["model"]["jump"].update({"skew": 0.1}),
    ])
    def test_unknown_keys_rejected(self, mutate):
        raw = _vanilla_config()
        mutate(raw)
        with pytest.raises(ConfigError):
            parse_config(raw)

    @pytest.mark.parametrize("mutate", [
        lambda c: c["contract"].update({"side": "straddle"}),
        lambda c: c["scenario"].update({"orders": [4]}),
        lambda c: c["scenario"].update({"maturities": [-1.0]}),
        lambda c: c["model"].update({"sigma": "big"}),
        lambda c: c["model"]["jump"].update({"variant": "levy"}),
    ])
    def test_bad_values_rejected(self, mutate):
        raw = _vanilla_config()
        mutate(raw)
        with pytest.raises(ConfigError):
            parse_config(raw)

    def test_barrier_contract_parses(self):
        raw = _vanilla_config()
        raw["model"] = {"r": 0.0488, "delta": 0.025, "sigma": 0.2}
        raw["contract"] = {
            "side": "put", "strike": 45.0,
            "barrier": {"level": 50.0, "direction": "up-and-out"},
        }
        cfg = parse_config(raw)
        assert cfg.barrier.level == 50.0
        assert cfg.barrier.rebate == "zero"


class TestCliExitCodes:
    def test_missing_config_file_is_exit_two(self, capsys):
        assert main(["price", "--config", "/nonexistent.json"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_config_is_exit_two(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        raw = _vanilla_config()
        raw["model"]["b"] = 0.0
        p.write_text(json.dumps(raw))
        assert main(["price", "--config", str(p)]) == 2

    def test_malformed_json_is_exit_two(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["price", "--config", str(p)]) == 2

    def test_solver_failure_is_exit_three(self, tmp_path, capsys):
        # an up-and-out put whose exercise boundary pins at the barrier:
        # the boundary search cannot bracket a root
        raw = {
            "model": {"r": 0.0488, "delta": 0.0, "sigma": 0.2},
            "contract": {
                "side": "put", "strike": 50.0,
                "barrier": {"level": 49.0, "direction": "up-and-out",
                            "rebate": "intrinsic-at-barrier"},
            },
            "scenario": {"spots": [45.0], "maturities": [1.0]},
        }
        p = tmp_path / "pinned.json"
        p.write_text(json.dumps(raw))
        code = main(["price", "--config", str(p)])
        assert code == 3
        assert "solver error" in capsys.readouterr().err


class TestPriceCommand:
    def test_prices_reference_cell(self, tmp_path, capsys):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(_vanilla_config()))
        assert main(["price", "--config", str(p), "--json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 1
        # known third-order value for this contract
        assert rows[0]["prices_by_order"][3] == pytest.approx(10.583,
                                                              abs=0.005)
        assert rows[0]["price"] == rows[0]["prices_by_order"][-1]

    def test_text_output_lists_orders(self, tmp_path, capsys):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(_vanilla_config()))
        assert main(["price", "--config", str(p)]) == 0
        out = capsys.readouterr().out
        assert "N0=" in out and "N3=" in out and "boundary=" in out


class TestTableCommand:
    def test_csv_deterministic_and_round_trips(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["table", "6", "--out", str(out1)]) == 0
        assert main(["table", "6", "--threads", "2",
                     "--out", str(out2)]) == 0
        text = out1.read_text()
        assert text == out2.read_text()

        rows = list(csv.reader(io.StringIO(text)))
        header, body, footer = rows[0], rows[1:-1], rows[-1]
        assert footer[0] == "rmse"
        n_cols = [header.index(f"sigma02_n{n}") for n in range(4)]
        b_col = header.index("sigma02_benchmark")
        for n, col in enumerate(n_cols):
            errs = [float(r[col]) - float(r[b_col]) for r in body]
            rmse = math.sqrt(sum(e * e for e in errs) / len(errs))
            assert abs(rmse - float(footer[col])) < 1e-12

    def test_no_benchmark_skips_column_and_footer(self, tmp_path):
        out = tmp_path / "t.csv"
        assert main(["table", "6", "--no-benchmark",
                     "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        bench = rows[0].index("sigma02_benchmark")
        assert all(r[bench] == "" for r in rows[1:])
        assert rows[-1][0] != "rmse"

    def test_json_table_has_full_precision(self, tmp_path):
        out = tmp_path / "t.json"
        assert main(["table", "6", "--no-benchmark", "--json",
                     "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert payload["table"] == 6
        cell = payload["cells"][0]
        assert len(cell["approximations"]) == 4
        # full precision, not the 3-decimal CSV rounding
        assert cell["european"] != round(cell["european"], 3)


class TestSweepCommand:
    def test_sigma_sweep_csv_shape(self, tmp_path):
        out = tmp_path / "s.csv"
        assert main(["sweep", "sigma", "--points", "3",
                     "--out", str(out)]) == 0
        rows = list(csv.reader(io.StringIO(out.read_text())))
        assert rows[0] == ["sigma", "err_n0", "err_n1", "err_n2", "err_n3"]
        assert len(rows) == 4
        assert float(rows[1][0]) == pytest.approx(0.075)
        assert float(rows[-1][0]) == pytest.approx(0.525)


class TestBenchmarkCommand:
    def test_benchmark_engine_prices(self, tmp_path, capsys):
        raw = {
            "model": {"r": 0.0488, "delta": 0.025, "sigma": 0.2},
            "contract": {
                "side": "put", "strike": 45.0,
                "barrier": {"level": 50.0, "direction": "up-and-out"},
            },
            "scenario": {"spots": [45.0], "maturities": [0.25]},
        }
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(raw))
        assert main(["benchmark", "--config", str(p), "--json"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert rows[0]["engine"] == "tree"
        assert rows[0]["price"] == pytest.approx(1.644, abs=0.005)


class TestTableDefinitions:
    def test_all_seven_tables_defined(self):
        assert sorted(TABLES) == [1, 2, 3, 4, 5, 6, 7]
        for table in TABLES.values():
            assert len(table.maturities) == 3
            assert len(table.spots) == 5

    def test_compute_table_without_benchmark_is_fast(self):
        import time
        t0 = time.time()
        res = compute_table(1, with_benchmark=False)
        assert time.time() - t0 < 60.0
        assert len(res.cells) == 30
        assert res.rmse == {}

    def test_sweep_points_are_monotone_axis(self):
        pts = compute_sweep("lambda", n_points=3)
        values = [v for v, _ in pts]
        assert values == sorted(values)
        for _, errs in pts:
            assert len(errs) == 4
            assert all(e >= 0.0 for e in errs)
