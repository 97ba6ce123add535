import pytest


def pytest_addoption(parser):
    parser.addoption("--heavy", action="store_true", default=False,
                     help="run the long sweeps (GL5 depth two case, full Weil restriction sweep)")


def pytest_configure(config):
    config.addinivalue_line("markers", "heavy: long running check, enabled with --heavy")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--heavy"):
        return
    skip = pytest.mark.skip(reason="needs --heavy")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def heavy(request):
    return request.config.getoption("--heavy")
