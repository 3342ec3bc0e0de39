# tests/test_runner.py is a standalone CLI runner (parses argv at import time),
# not a test module; the suites it drives are collected directly by pytest.
collect_ignore = ["tests/test_runner.py"]
