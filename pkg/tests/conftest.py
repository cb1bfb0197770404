import pytest

from imbrex import catalog

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    prev = ACCEPTANCE.get(criterion)
    if prev is not None:
        ok = ok and prev[0]
        detail = "; ".join(d for d in (prev[1], detail) if d)
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def segre12():
    return catalog.build("segre", p=1, r=2, q=2)


@pytest.fixture(scope="session")
def segre22():
    return catalog.build("segre", p=2, r=2, q=2)


@pytest.fixture(scope="session")
def a42():
    return catalog.build("grassmann", n=4, q=2)


@pytest.fixture(scope="session")
def h44():
    return catalog.build("imbrex_H4", q2=4)


@pytest.fixture(scope="session")
def w2():
    return catalog.build("W", q=2)
