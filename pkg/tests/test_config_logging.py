import json
import logging
import math

import pytest

from conelab.config import Config
from conelab.exceptions import InvalidParameterError
from conelab.main import main
from conelab.utils.logging_config import ColorFormatter, setup_logging
from conelab.utils.output import format_value, render_csv, render_json, write_rows


def test_seed_prefers_environment(monkeypatch):
    monkeypatch.delenv("CONELAB_SEED", raising=False)
    assert Config.seed() == 0
    assert Config.seed(5) == 5
    monkeypatch.setenv("CONELAB_SEED", "11")
    assert Config.seed(5) == 11
    monkeypatch.setenv("CONELAB_SEED", " ")
    assert Config.seed(5) == 5
    monkeypatch.setenv("CONELAB_SEED", "abc")
    with pytest.raises(InvalidParameterError):
        Config.seed(5)


def test_setup_logging_writes_files(tmp_path):
    log_dir = tmp_path / "logs"
    setup_logging("DEBUG", str(log_dir), color=False)
    logging.getLogger("conelab.test").error("❌ boom")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "boom" in (log_dir / "conelab.log").read_text(encoding="utf-8")
    assert "boom" in (log_dir / "error.log").read_text(encoding="utf-8")


def test_setup_logging_replaces_handlers():
    setup_logging("INFO", color=False)
    setup_logging("WARNING", color=False)
    root = logging.getLogger()
    assert len(root.handlers) == 1
    assert root.level == logging.WARNING


def test_unknown_level_falls_back_to_info():
    assert setup_logging("LOUD", color=False).level == logging.INFO


def test_color_formatter_wraps_message():
    record = logging.LogRecord("conelab", logging.ERROR, __file__, 1, "bad", None, None)
    text = ColorFormatter("%(message)s").format(record)
    assert text == "\033[91mbad\033[0m"


def test_cli_log_dir(tmp_path, capsys):
    log_dir = tmp_path / "logs"
    assert main(["gallery", "flat", "--nmax", "2", "--N", "3", "--log-dir", str(log_dir)]) == 0
    capsys.readouterr()
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "✅ gallery" in (log_dir / "conelab.log").read_text(encoding="utf-8")


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(math.nan) == "nan"
    assert format_value(-math.inf) == "-inf"
    assert format_value(3) == "3"


def test_render_csv_quotes_and_fills():
    text = render_csv([{'a': 1, 'b': "x,y"}, {'a': 2, 'c': False}], schema_version=1)
    lines = text.splitlines()
    assert lines[0] == "schema_version,a,b,c"
    assert lines[1] == '1,1,"x,y",'
    assert lines[2] == "1,2,,false"


def test_render_json_nulls_non_finite():
    payload = json.loads(render_json([{'delta': math.inf, 'n': 1}], {'seed': 0}))
    assert payload['rows'][0]['delta'] is None
    assert payload['metadata'] == {'seed': 0}


def test_write_rows_to_file(tmp_path):
    path = tmp_path / "nested" / "rows.csv"
    assert write_rows([{'n': 1}], "csv", str(path)) == str(path)
    assert path.read_text(encoding="utf-8") == "schema_version,n\n1,1\n"
