"""
This Py.Test plugin allows return value collection from testcases
(for cases when pass/fail is not enough).
Performance tests return a tuple ``(seconds, items)``
and are marked with the units the items are rendered in.
"""

import pytest

# renderers
renderers = {
    'Mpix/s': lambda x: "{f:.2f} Mpix/s".format(f=float(x[1]) / x[0] / 1e6),
    'Mpts/s': lambda x: "{f:.2f} Mpts/s".format(f=float(x[1]) / x[0] / 1e6),
    'frames/s': lambda x: "{f:.2f} frames/s".format(f=float(x[1]) / x[0]),
}

def pytest_configure(config):
    config.pluginmanager.register(ReturnValuesPlugin(), "returnvalues")
    config.addinivalue_line("markers", "returns(value_type): collect this testcase's return value")


class ReturnValuesPlugin:

    @pytest.hookimpl(hookwrapper=True)
    def pytest_report_teststatus(self, report):
        outcome = yield
        out, letter, msg = outcome.get_result()

        # show the collected value instead of 'PASSED'
        if hasattr(report, 'retval'):
            msg = report.retval

        outcome.force_result((out, letter, msg))

    @pytest.hookimpl(tryfirst=True)
    def pytest_pyfunc_call(self, pyfuncitem):
        if pyfuncitem.get_closest_marker('returns') is None:
            return None

        # Calling the test ourselves, so that its return value is not discarded.
        funcargs = pyfuncitem.funcargs
        testargs = {arg: funcargs[arg] for arg in pyfuncitem._fixtureinfo.argnames}
        pyfuncitem.retval = pyfuncitem.obj(**testargs)
        return True

    @pytest.hookimpl(hookwrapper=True)
    def pytest_runtest_makereport(self, item, call):
        outcome = yield
        report = outcome.get_result()

        returns_mark = item.get_closest_marker('returns')

        if call.when == 'call' and report.passed and returns_mark is not None:
            if len(returns_mark.args) > 0 and returns_mark.args[0] in renderers:
                renderer = renderers[returns_mark.args[0]]
            elif len(returns_mark.args) > 0:
                renderer = lambda x: repr(x) + " " + returns_mark.args[0]
            else:
                renderer = repr

            report.retval = renderer(item.retval)

        outcome.force_result(report)
