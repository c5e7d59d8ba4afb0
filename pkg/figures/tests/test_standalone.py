"""The plotting package is strictly downstream: nothing upstream knows it.

Deleting this whole directory must leave the main package's suite green,
which is guaranteed structurally: no source, test, or demo file up there
references this package.  This test pins that property.
"""
import os

HERE = os.path.dirname(os.path.abspath(__file__))
REPO = os.path.dirname(os.path.dirname(HERE))


def test_nothing_upstream_references_this_package():
    offenders = []
    for top in ("src", "tests", "demos"):
        for dirpath, dirnames, filenames in os.walk(os.path.join(REPO, top)):
            dirnames[:] = [d for d in dirnames if d != "__pycache__"]
            for name in filenames:
                if not name.endswith((".py", ".toml", ".cfg", ".txt")):
                    continue
                path = os.path.join(dirpath, name)
                with open(path, encoding="utf-8", errors="replace") as fh:
                    if "figscripts" in fh.read():
                        offenders.append(os.path.relpath(path, REPO))
    assert offenders == []


def test_simulator_import_does_not_pull_this_package_in():
    import importlib
    import sys

    sys.modules.pop("figscripts", None)
    importlib.import_module("ratelab.sim_loop")
    importlib.import_module("ratelab.cli")
    assert "figscripts" not in sys.modules
