from pathlib import Path

import numpy as np
import pytest

from corelab.graphs import single_vertex_graph
from corelab.reps import GraphRep

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "corelab" / "fixtures"


def fixture(name: str) -> Path:
    return FIXTURES / f"{name}.json"


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def coisometric_row(d: int, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """n matrices d x d with sum a a* = I (a random defect-free row)."""
    z = rng.normal(size=(n * d, d)) + 1j * rng.normal(size=(n * d, d))
    q, _ = np.linalg.qr(z)
    row = q.conj().T
    return [row[:, i * d:(i + 1) * d] for i in range(n)]


def contractive_row(d: int, n: int, rng: np.random.Generator, scale: float | None = None) -> list[np.ndarray]:
    mats = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(n)]
    norm = np.linalg.norm(np.hstack(mats), 2)
    s = rng.uniform(0.3, 1.0) if scale is None else scale
    return [s * m / norm for m in mats]


def triangular_row(d1: int, d2: int, n: int, rng: np.random.Generator, coisometric: bool = True):
    """Row on C^(d1+d2) leaving the first d1 coordinates invariant under every A*.

    With ``coisometric`` the row is defect free; otherwise it is scaled by 0.6.
    """
    d = d1 + d2
    top = coisometric_row(d1, n, rng)
    t = np.zeros((d1, n * d), complex)
    for i in range(n):
        t[:, i * d:i * d + d1] = top[i]
    z = rng.normal(size=(n * d, n * d)) + 1j * rng.normal(size=(n * d, n * d))
    z = z - t.conj().T @ (t @ z)
    q, _ = np.linalg.qr(z)
    row = np.vstack([t, q[:, :d2].conj().T])
    mats = [row[:, i * d:(i + 1) * d] for i in range(n)]
    return mats if coisometric else [0.6 * a for a in mats]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# --- acceptance summary -------------------------------------------------------

_CRITERIA: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    n, title = mark.args
    _CRITERIA[n] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        title, verdict, secs = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}  {verdict}  {title}  ({secs:.2f}s)")
