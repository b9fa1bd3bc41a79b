import pytest

from normtile import generators as gen

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def torus_patterns():
    return {f: gen.generate(gen.PatternSpec(f, 4, 4))
            for f in ("honeycomb", "brick", "rooftile", "square_grid")}


@pytest.fixture(scope="session")
def platonic_meshes():
    return {k: gen.platonic(k) for k in gen.PLATONIC}


@pytest.fixture(scope="session")
def monohedral_demos():
    return {k: gen.gen_monohedral_demo(k, 4, 4)
            for k in ("square", "brick_rect", "rooftile_curved")}


@pytest.fixture(scope="session")
def voronoi_small():
    return gen.gen_voronoi_torus(30, 5)
