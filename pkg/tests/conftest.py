import pytest

# criterion number -> "PASS" / "FAIL", filled in by test_acceptance
ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    def record(number):
        ACCEPTANCE[number] = "FAIL"
        request.node.user_properties.append(("criterion", number))
        return number
    yield record
    for name, number in request.node.user_properties:
        if name == "criterion" and request.node.rep_call.passed:
            ACCEPTANCE[number] = "PASS"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {ACCEPTANCE[number]}")
