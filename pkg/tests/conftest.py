import pytest

EXAMPLE_MODULES = ("test_cost_model.py", "test_schedule.py")

# filled by test_acceptance, printed once at the end of the session
ACCEPTANCE_LINES: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "example: worked numeric example (no property search)")


def pytest_collection_modifyitems(items):
    for item in items:
        fn = getattr(item, "function", None)
        if item.path.name in EXAMPLE_MODULES and fn is not None and not getattr(fn, "is_hypothesis_test", False):
            item.add_marker(pytest.mark.example)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
