# -*- coding: utf-8 -*-
"""
Unit tests for the command-line interface (cli.py).

These tests verify:
- The run, validate and examples subcommands and their output.
- The mapping of config, domain, numerical and I/O failures to exit codes.
- The --threads / PTLAB_THREADS precedence.
"""
import sys
from unittest.mock import patch

import pytest

from ptlab import __version__, cli
from ptlab.config import THREADS_ENV_VAR
from ptlab.errors import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE, EXIT_OK, ConfigError, NumericalError


@patch('ptlab.cli.sys.exit')
def test_cli_run_writes_tables(mock_exit, make_document, write_config, tmp_path, monkeypatch):
    """Tests a spectrum run that writes the main and summary tables."""
    # Arrange
    config_path = write_config(make_document())
    out = tmp_path / "dimer.csv"
    monkeypatch.setattr(sys, 'argv', ['ptlab', 'run', str(config_path), '--out', str(out)])

    # Act
    cli.main()

    # Assert
    mock_exit.assert_called_once_with(EXIT_OK)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "eig_index,re_E,im_E"
    assert len(lines) == 3
    summary = (tmp_path / "dimer_summary.csv").read_text(encoding="utf-8").splitlines()
    assert summary[0] == "re_coupling,im_coupling,max_abs_imag,is_real"
    assert summary[1].endswith(",true")


@patch('ptlab.cli.sys.exit')
def test_cli_run_to_stdout(mock_exit, make_document, write_config, capsys):
    """Tests that without an output path only the main table goes to stdout."""
    # Arrange
    config_path = write_config(make_document())

    # Act
    cli.main(['run', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_OK)
    captured = capsys.readouterr()
    assert captured.out.splitlines()[0] == "eig_index,re_E,im_E"
    assert "re_coupling" not in captured.out


@patch('ptlab.cli.sys.exit')
def test_cli_run_uses_config_output(mock_exit, make_document, write_config, tmp_path):
    """Tests that the config's 'output' is used when --out is absent."""
    # Arrange
    out = tmp_path / "from_config.csv"
    config_path = write_config(make_document(output=str(out)))

    # Act
    cli.main(['run', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_OK)
    assert out.is_file()


@patch('ptlab.cli.sys.exit')
def test_cli_validate(mock_exit, make_document, write_config, capsys):
    """Tests that validate reports the scenario without running it."""
    # Arrange
    config_path = write_config(make_document())

    # Act
    cli.main(['validate', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_OK)
    assert "valid spectrum configuration (2 sites, 1 tone(s))" in capsys.readouterr().out


@patch('ptlab.cli.sys.exit')
def test_cli_invalid_config(mock_exit, make_document, write_config, capsys):
    """Tests that an unbalanced lattice is reported with its field and exit code 2."""
    # Arrange
    document = make_document(lattice={"n_sites": 2, "tunnelings": [1.0], "gammas": [0.1, 0.1]})
    config_path = write_config(document)

    # Act
    cli.main(['run', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_CONFIG_ERROR)
    captured = capsys.readouterr()
    assert "Error: field 'lattice.gammas'" in captured.err
    assert captured.out == ""


@patch('ptlab.cli.sys.exit')
def test_cli_syntax_error(mock_exit, write_config, capsys):
    """Tests that malformed JSON is reported with its position."""
    # Arrange
    config_path = write_config('{"scenario": "spectrum",\n "lattice": [}')

    # Act
    cli.main(['validate', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_CONFIG_ERROR)
    assert "Error: line 2, column" in capsys.readouterr().err


@patch('ptlab.cli.sys.exit')
def test_cli_missing_config(mock_exit, tmp_path, capsys):
    """Tests that an unreadable config file is a config error."""
    # Act
    cli.main(['run', str(tmp_path / "missing.json")])

    # Assert
    mock_exit.assert_called_once_with(EXIT_CONFIG_ERROR)
    assert "Could not read config file" in capsys.readouterr().err


@patch('ptlab.cli.sys.exit')
def test_cli_unwritable_output(mock_exit, make_document, write_config, tmp_path, capsys):
    """Tests that a failing write is reported and mapped to exit code 2."""
    # Arrange
    config_path = write_config(make_document())
    out = tmp_path / "no_such_dir" / "out.csv"

    # Act
    cli.main(['run', str(config_path), '--out', str(out)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_CONFIG_ERROR)
    assert "Error: Could not write output" in capsys.readouterr().err


@patch('ptlab.cli.sys.exit')
def test_cli_overflow_exit_code(mock_exit, make_document, write_config, tmp_path, capsys):
    """Tests that an overflowing propagation still writes its trace but exits with 3."""
    # Arrange
    document = make_document(scenario="propagate",
                             lattice={"n_sites": 2, "tunnelings": [1.0], "gammas": [50.0, -50.0]},
                             modulation={"l": 0, "omega0": 1.0},
                             propagation={"z_end": 20.0, "steps": 20000, "initial": {"site": 1}})
    config_path = write_config(document)
    out = tmp_path / "trace.csv"

    # Act
    cli.main(['run', str(config_path), '--out', str(out)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_NUMERICAL_FAILURE)
    assert out.read_text(encoding="utf-8").rstrip("\n").endswith(",overflow")
    assert "overflowed" in capsys.readouterr().err


@patch('ptlab.cli.run')
@patch('ptlab.cli.sys.exit')
def test_cli_numerical_failure(mock_exit, mock_run, make_document, write_config, capsys):
    """Tests that a NumericalError maps to exit code 3."""
    # Arrange
    mock_run.side_effect = NumericalError("Eigenvalue iteration did not converge")
    config_path = write_config(make_document())

    # Act
    cli.main(['run', str(config_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_NUMERICAL_FAILURE)
    assert "did not converge" in capsys.readouterr().err


@patch('ptlab.cli.sys.exit')
def test_cli_examples(mock_exit, tmp_path, capsys):
    """Tests that the examples subcommand writes the example folder."""
    # Act
    cli.main(['examples', str(tmp_path)])

    # Assert
    mock_exit.assert_called_once_with(EXIT_OK)
    assert "Successfully created" in capsys.readouterr().out
    assert (tmp_path / "ptlab_examples" / "dimer_threshold.json").is_file()


@patch('ptlab.cli.run')
@patch('ptlab.cli.sys.exit')
def test_cli_threads_reach_runner(mock_exit, mock_run, make_document, write_config, monkeypatch):
    """Tests that --threads and the environment variable are passed to the runner."""
    # Arrange
    config_path = write_config(make_document())
    mock_run.side_effect = NumericalError("stop")
    monkeypatch.setenv(THREADS_ENV_VAR, "3")

    # Act
    cli.main(['run', str(config_path)])
    cli.main(['run', str(config_path), '--threads', '5'])

    # Assert
    assert [c.args[1] for c in mock_run.call_args_list] == [3, 5]


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    assert cli.resolve_threads(None) == 1
    assert cli.resolve_threads(4) == 4
    monkeypatch.setenv(THREADS_ENV_VAR, "2")
    assert cli.resolve_threads(None) == 2
    assert cli.resolve_threads(6) == 6
    monkeypatch.setenv(THREADS_ENV_VAR, "many")
    with pytest.raises(ConfigError):
        cli.resolve_threads(None)
    with pytest.raises(ConfigError):
        cli.resolve_threads(0)


def test_cli_version(capsys):
    """Tests that --version prints the package version."""
    with pytest.raises(SystemExit):
        cli.main(['--version'])
    assert __version__ in capsys.readouterr().out


def test_cli_requires_command(capsys):
    """Tests that a missing subcommand is an argparse usage error."""
    with pytest.raises(SystemExit) as excinfo:
        cli.main([])
    assert excinfo.value.code == 2
    assert "usage" in capsys.readouterr().err
