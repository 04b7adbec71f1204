"""End-to-end run of the command-line pipeline, twice.

`hdikit report` chains everything: completeness audit, hidden-size
sweep, holdout evaluation of the winning classifier, and (HDI, GDP)
clustering with an SVG scatter.  Every artifact is a pure function of
(input CSV, config, seed), so re-running into a second directory must
reproduce every file byte for byte — which this script verifies.
"""

import filecmp
import os
import tempfile

from hdikit.cli import main

from synthdata import write_demo_csv

with tempfile.TemporaryDirectory() as workdir:
    data = os.path.join(workdir, "indicators.csv")
    write_demo_csv(data, n_regions=80, seed=0)

    common = [data, "--seed", "42", "--epochs", "150", "--lr", "1.0"]
    out1 = os.path.join(workdir, "run1")
    out2 = os.path.join(workdir, "run2")

    print("$ hdikit report indicators.csv --out run1 --seed 42 ...")
    code = main(["report", *common[:1], "--out", out1, *common[1:]])
    assert code == 0, f"exit code {code}"

    print("\nartifacts:")
    for name in sorted(os.listdir(out1)):
        size = os.path.getsize(os.path.join(out1, name))
        print(f"  {name:<22} {size:>7} bytes")

    print("\n$ hdikit report indicators.csv --out run2 --seed 42 ...")
    assert main(["report", *common[:1], "--out", out2, *common[1:]]) == 0

    names = sorted(os.listdir(out1))
    match, mismatch, errors = filecmp.cmpfiles(out1, out2, names,
                                               shallow=False)
    assert not mismatch and not errors, (mismatch, errors)
    print(f"\nall {len(match)} artifacts byte-identical across the two runs")
