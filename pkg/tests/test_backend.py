"""Kernel-backend selection: env-flag parsing and rejection of typos."""
from __future__ import annotations

import os
import subprocess
import sys

import pytest

from qdctl import backend


class TestFlagParsing:
    @pytest.mark.parametrize("flag", ["0", "off", "false", "no", "numpy", " NumPy "])
    def test_numpy_tokens(self, monkeypatch, flag):
        monkeypatch.setenv("QDCTL_NUMBA", flag)
        assert backend._load().BACKEND_NAME == "numpy"

    @pytest.mark.parametrize("flag", ["1", "on", "true", "yes", "require", "numba"])
    def test_numba_tokens(self, monkeypatch, flag):
        monkeypatch.setenv("QDCTL_NUMBA", flag)
        mod = pytest.importorskip("numba", reason="numba tokens need numba installed")
        assert mod is not None
        assert backend._load().BACKEND_NAME == "numba"

    @pytest.mark.parametrize("flag", ["auto", "", "  "])
    def test_auto_tokens_resolve(self, monkeypatch, flag):
        monkeypatch.setenv("QDCTL_NUMBA", flag)
        assert backend._load().BACKEND_NAME in ("numpy", "numba")

    def test_unset_resolves(self, monkeypatch):
        monkeypatch.delenv("QDCTL_NUMBA", raising=False)
        assert backend._load().BACKEND_NAME in ("numpy", "numba")

    @pytest.mark.parametrize("flag", ["bogus", "numpa", "2", "numba!"])
    def test_unrecognized_token_rejected(self, monkeypatch, flag):
        monkeypatch.setenv("QDCTL_NUMBA", flag)
        with pytest.raises(ValueError, match="unrecognized QDCTL_NUMBA value"):
            backend._load()


def test_cli_rejects_unrecognized_flag(tmp_path):
    """A typo'd QDCTL_NUMBA must fail the command (exit 2), not silently
    select a backend.  Needs a subprocess: the parent's kernel module is
    already resolved and cached."""
    env = dict(os.environ, QDCTL_NUMBA="numpa")
    proc = subprocess.run(
        [sys.executable, "-m", "qdctl.cli", "demo", "--n", "3",
         "--out", str(tmp_path / "out.json")],
        env=env,
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 2
    assert "unrecognized QDCTL_NUMBA value" in proc.stderr
    assert not (tmp_path / "out.json").exists()
