import numpy as np
import pytest


@pytest.fixture(scope="session")
def pairs8():
    """All ordered 8-bit operand pairs."""
    a, b = np.meshgrid(np.arange(256, dtype=np.uint64), np.arange(256, dtype=np.uint64), indexing="ij")
    return a.ravel(), b.ravel()


@pytest.fixture(scope="session")
def div_pairs_8_4():
    """All valid (dividend, divisor) pairs of the 8/4 divider, zero dividend included."""
    d, v = np.meshgrid(np.arange(256, dtype=np.uint64), np.arange(1, 16, dtype=np.uint64), indexing="ij")
    d, v = d.ravel(), v.ravel()
    ok = d < (v << np.uint64(4))
    return d[ok], v[ok]


# --- acceptance reporting ---------------------------------------------------------

ACCEPTANCE: dict[int, list] = {}


class Recorder:
    def __call__(self, criterion: int, ok: bool, detail: str):
        ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


@pytest.fixture(scope="session")
def record():
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        if all(d.startswith("EXCLUDED") for _, d in parts):
            status = "EXCLUDED"
        else:
            status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {n}: {status} - {detail}")
