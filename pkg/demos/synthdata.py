"""Synthetic regional-indicator table shared by the demo scripts.

Generates a wide-format CSV shaped like the open-government exports the
toolkit ingests: one row per (region, indicator), one column per year,
blank cells where an agency never published a number.  HDI is planted
in four development bands so the classifier and the clustering demos
both have visible structure to find.
"""

import numpy as np

from hdikit.ingest import parse_wide_csv, write_wide_csv

INDICATORS = ("HDI", "GDP", "NPP", "NIU", "NL", "NP")
YEARS = (2010, 2011, 2012)
BANDS = ((44.0, 57.0), (61.5, 68.5), (71.5, 78.5), (81.5, 93.0))


def make_table(n_regions: int = 80, seed: int = 0):
    """A parsed IndicatorTable of n_regions synthetic regions."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n_regions):
        # a few quoted names with commas, like real gazetteer entries
        name = f"Kab. {i:03d}, Kota" if i % 9 == 0 else f"Region {i:03d}"
        lo, hi = BANDS[i % 4]
        hdi10 = float(rng.uniform(lo, hi))
        hdi12 = min(hdi10 + float(rng.uniform(0.0, 1.5)), 94.0)
        gdp10 = 15.0 + 0.8 * hdi10 + float(rng.uniform(-2.0, 2.0))
        gdp12 = gdp10 * (1.0 + float(rng.uniform(0.0, 0.12)))
        values = {
            "HDI": {2010: hdi10, 2012: hdi12},
            "GDP": {2010: gdp10, 2012: gdp12},
            # census-style predictors, correlated with development level
            "NPP": {2010: 190.0 - 1.6 * hdi10 + float(rng.uniform(-3, 3))},
            "NIU": {2010: 5.0 + 0.9 * hdi10 + float(rng.uniform(-2, 2))},
            "NL": {2010: 20.0 + 0.5 * hdi10 + float(rng.uniform(-1.5, 1.5))},
            "NP": {2010: 60.0 + float(rng.uniform(-5, 5))},
        }
        for indicator in INDICATORS:
            cells = {y: values[indicator].get(y) for y in YEARS}
            rows.append((name, indicator, cells))

    lines = ["Area Name,Indicator Name," + ",".join(str(y) for y in YEARS)]
    for name, indicator, cells in rows:
        quoted = f'"{name}"' if "," in name else name
        cols = ["" if cells[y] is None else repr(round(cells[y], 2))
                for y in YEARS]
        lines.append(",".join([quoted, indicator, *cols]))
    return parse_wide_csv("\n".join(lines) + "\n")


def write_demo_csv(path, n_regions: int = 80, seed: int = 0) -> None:
    table = make_table(n_regions=n_regions, seed=seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(write_wide_csv(table))
