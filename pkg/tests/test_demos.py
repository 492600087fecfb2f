import runpy
from pathlib import Path

import pytest

DEMOS = sorted((Path(__file__).parent.parent / "demos").glob("*.py"))


@pytest.mark.parametrize("path", DEMOS, ids=[p.stem for p in DEMOS])
def test_demo_runs(path, capsys):
    # run_name keeps the optional full sweeps behind __main__ guards out
    runpy.run_path(str(path), run_name="demo")
    assert capsys.readouterr().out
