import os

import pytest
from hypothesis import HealthCheck, settings

from kindlemma import engine as en

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _no_secret_key(monkeypatch):
    monkeypatch.delenv("LEMMA_AI_API_KEY", raising=False)


def pytest_sessionfinish(session, exitstatus):
    # the soundness gate must never have been bypassed anywhere in the run
    if en.AUDIT.unproven != 0:
        session.exitstatus = 1
        print(f"\nAUDIT: {en.AUDIT.unproven} unproven lemma admission(s)")
