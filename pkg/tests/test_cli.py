"""CLI surface: subcommands, env-var config, exit codes, live socket roles."""

import json
import os
import re
import subprocess
import sys
import threading

import numpy as np
import pytest

from ehsim.cli import main
from ehsim.config import default_config, save_config
from ehsim.trace import read_trace


def run_cli(args, env=None):
    merged = dict(os.environ)
    merged.pop("EHSIM_CONFIG", None)
    if env:
        merged.update(env)
    return subprocess.run(
        [sys.executable, "-m", "ehsim.cli", *args],
        capture_output=True, text=True, env=merged, timeout=120,
    )


class TestBasicInvocations:
    def test_calibrate_exit_zero_and_summary(self, tmp_path):
        result = run_cli(["calibrate", "--out", str(tmp_path)])
        assert result.returncode == 0
        summary = json.loads(result.stdout)
        assert 8.0e-5 <= summary["fitted_k"] <= 1.1e-4

    def test_bad_config_machine_readable_error(self, tmp_path):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"actuator": {"oil_volume": -2}}')
        result = run_cli(["calibrate", "--config", str(cfg), "--out", str(tmp_path)])
        assert result.returncode != 0
        error = json.loads(result.stderr.strip().splitlines()[-1])
        assert error["error"] == "ConfigError"
        assert "oil_volume" in error["message"]

    def test_missing_config_file(self, tmp_path):
        result = run_cli(["calibrate", "--config", str(tmp_path / "nope.json"),
                          "--out", str(tmp_path)])
        assert result.returncode != 0
        json.loads(result.stderr.strip().splitlines()[-1])

    def test_env_var_config(self, tmp_path):
        path = save_config(default_config(), tmp_path / "cfg.json")
        result = run_cli(["step-response", "--out", str(tmp_path)],
                         env={"EHSIM_CONFIG": str(path)})
        assert result.returncode == 0
        assert json.loads(result.stdout)["rise_time_ms"] == pytest.approx(53.0, abs=1.0)

    def test_duration_override(self, tmp_path):
        rc = main(["step-response", "--out", str(tmp_path), "--duration", "300"])
        assert rc == 0
        assert len(read_trace(tmp_path / "step_response.csv")) == 301

    def test_unknown_subcommand(self, tmp_path):
        result = run_cli(["transmogrify", "--out", str(tmp_path)])
        assert result.returncode != 0


class TestTeleopRoles:
    def test_demo_role(self, tmp_path):
        rc = main(["teleop", "--role", "demo", "--out", str(tmp_path),
                   "--duration", "1200"])
        assert rc == 0
        assert (tmp_path / "teleop_demo_spring_light.csv").exists()

    def test_master_requires_connect(self, tmp_path):
        assert main(["teleop", "--role", "master", "--out", str(tmp_path)]) != 0

    def test_slave_requires_listen(self, tmp_path):
        assert main(["teleop", "--role", "slave", "--out", str(tmp_path)]) != 0

    def test_live_two_process_session(self, tmp_path):
        """Slave subprocess + in-process master over a TCP loopback socket."""
        slave = subprocess.Popen(
            [sys.executable, "-m", "ehsim.cli", "teleop", "--role", "slave",
             "--listen", "127.0.0.1:0", "--object", "spring_light",
             "--duration", "8000", "--out", str(tmp_path)],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        try:
            line = slave.stdout.readline()
            match = re.match(r"listening on ([\d.]+):(\d+)", line)
            assert match, f"unexpected slave announcement: {line!r}"
            endpoint = f"{match.group(1)}:{match.group(2)}"
            rc = main(["teleop", "--role", "master", "--connect", endpoint,
                       "--duration", "1500", "--out", str(tmp_path)])
            assert rc == 0
            slave.wait(timeout=30)
        finally:
            if slave.poll() is None:
                slave.kill()
            slave.wait()
        trace = read_trace(tmp_path / "teleop_master.csv")
        # statistically equivalent to the deterministic session: the slave
        # mirrored the pinch and the reflected force approached the spring law
        assert trace.slave_position[-1] == pytest.approx(4.0, abs=0.2)
        tail = trace.actual_force[trace.t >= 1200.0]
        assert np.abs(tail - 0.9).max() < 0.15
