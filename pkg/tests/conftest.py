import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True, scope="session")
def _engine_defaults():
    import hitproblem.hit_engine as H
    H.configure(checkpoint_dir=None, verbose=False)
    yield
