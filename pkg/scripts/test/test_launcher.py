#!/usr/bin/env python3
"""
Tests for the checkout launcher's choice of interpreter.
"""
import kstab


def make_venv(root, name):
    py = root / name / "bin" / "python"
    py.parent.mkdir(parents=True)
    py.write_text("")
    return py


def test_skip_variable_keeps_the_current_interpreter(monkeypatch):
    monkeypatch.setenv("KSTAB_SKIP_VENV", "1")
    assert kstab._local_interpreter() is None


def test_install_environment_is_tried_first(tmp_path):
    make_venv(tmp_path, "venv")
    env = make_venv(tmp_path, "kstab_env")
    assert next(kstab._interpreters(tmp_path)) == env
    assert [p.parent.parent.name for p in kstab._interpreters(tmp_path)] == ["kstab_env", "venv"]


def test_no_local_environment(tmp_path, monkeypatch):
    monkeypatch.delenv("KSTAB_SKIP_VENV", raising=False)
    monkeypatch.setattr(kstab, "_interpreters", lambda root=tmp_path: iter(()))
    assert kstab._local_interpreter() is None
