import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion id -> {"title": str, "checks": [(name, outcome, detail)]}
_CRITERIA = OrderedDict()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        cid, title = mark.args
        entry = _CRITERIA.setdefault(cid, {"title": title, "checks": []})
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        entry["checks"].append((item.name, rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_CRITERIA):
        entry = _CRITERIA[cid]
        ok = all(o == "passed" for _, o, _ in entry["checks"])
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {entry['title']}")
        for name, o, detail in entry["checks"]:
            tag = "ok  " if o == "passed" else o
            tr.write_line(f"        {tag} {name}" + (f"  [{detail}]" if detail else ""))
