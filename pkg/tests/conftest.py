import os
import sys
from functools import lru_cache

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ftcomplex.complex import instantiate  # noqa: E402
from ftcomplex.generators.catalog import FUSION_CATALOG, catalog  # noqa: E402


@lru_cache(maxsize=None)
def complex_at(name, dims=(2, 2, 2)):
    return instantiate(catalog(name), dims)


@pytest.fixture(params=FUSION_CATALOG)
def fusion_name(request):
    return request.param


DATA = os.path.join(os.path.dirname(__file__), "data")
