import pytest


@pytest.fixture(autouse=True)
def _no_ambient_cache(monkeypatch):
    # keep tests hermetic: the digit cache only engages when a test opts in
    monkeypatch.delenv("PI_LAB_CACHE", raising=False)
