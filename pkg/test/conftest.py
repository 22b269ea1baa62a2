import numpy
import pytest

pytest_plugins = ['pytest_returnvalues']


def pytest_addoption(parser):
    parser.addoption("--api", action="store",
        help="GPU API for the device tests: cuda/ocl/supported",
        default="supported", choices=["cuda", "ocl", "supported"])


@pytest.fixture
def rng():
    return numpy.random.default_rng(123)


@pytest.fixture
def thr(request):
    """
    A ``reikna`` thread on the first available device of the requested API.
    Skips the test if ``reikna`` or the API are not available.
    """
    cluda = pytest.importorskip("reikna.cluda")

    api_name = request.config.option.api
    try:
        if api_name == 'supported':
            api = cluda.any_api()
        elif api_name == 'cuda':
            api = cluda.cuda_api()
        else:
            api = cluda.ocl_api()
        thread = api.Thread.create()
    except Exception as e:
        pytest.skip("No GPU device available: " + str(e))

    yield thread
    thread.release()
