"""Build the extension, import it and exercise each entry point.

Usage: python3 python/smoke_test.py [--no-build]
"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "dlw-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )


def load():
    lib = ROOT / "target" / "release" / "libdlw_py.so"
    dest = pathlib.Path(tempfile.mkdtemp()) / "dlw_py.so"
    shutil.copy(lib, dest)
    sys.path.insert(0, str(dest.parent))
    import dlw_py

    return dlw_py


def main():
    if "--no-build" not in sys.argv:
        build()
    dlw = load()

    assert dlw.smith([[2, 4], [6, 8]]) == [2, 4]
    # d: Z -> Z, 1 -> 2 gives Z/2 in the cokernel.
    assert dlw.cohomology([[2]], [], 1) == (0, [2])

    doc = dlw.Document.synth("pipeline", 3)
    again = dlw.Document.from_json(doc.to_json())
    assert again.normalized() == doc.normalized()
    code, out = doc.run("propagate")
    assert code == 0, out
    assert json.loads(out)["verified"] is True

    code, out = dlw.Document.synth("lim", 1).run("lim", n_max=2)
    assert code == 0, out
    assert all(d["equal"] for d in json.loads(out)["degrees"])

    code, _ = dlw.Document.synth("delta", 0).run("delta")
    assert code == 0

    code, out = dlw.run("lim", "{not json")
    assert code == 2 and "error" in json.loads(out)
    try:
        dlw.Document.from_json('{"system": 3}')
    except ValueError:
        pass
    else:
        raise AssertionError("malformed document accepted")

    checks = dlw.selftest(0)
    assert checks and all(passed for *_, passed in checks), checks
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
