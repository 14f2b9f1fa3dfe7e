import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oracles import make_monthly_counts
from priorscan import ingest_timeseries

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def counts_csv(tmp_path_factory):
    """Synthetic 192-month count series written as a one-column CSV."""
    counts = make_monthly_counts()
    path = tmp_path_factory.mktemp("data") / "synthetic_counts.csv"
    path.write_text("count\n" + "".join(f"{int(c)}\n" for c in counts))
    return path


@pytest.fixture(scope="session")
def model192(counts_csv):
    return ingest_timeseries(counts_csv)


@pytest.fixture(scope="session")
def model96(counts_csv):
    return ingest_timeseries(counts_csv, window="last96")


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
