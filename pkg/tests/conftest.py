"""Shared fixtures: hand-built and planted synthetic indicator tables."""

import csv
import io

import numpy as np
import pytest

# the (indicator, year) pairs every region covers in the hand fixture;
# everything else is left incomplete on purpose
COMPLETE_PAIRS = {
    ("HDI", 2010), ("HDI", 2012),
    ("GDP", 2010), ("GDP", 2012),
    ("NPP", 2010), ("NIU", 2010), ("NL", 2010), ("NP", 2010),
}

HAND_REGIONS = ["Bandung, Kota", "Bekasi", "Bogor", "Cirebon"]


def hand_csv() -> str:
    """Four regions, three years, blanks exactly off the complete set.

    Region names include an embedded comma to force quoting.  The
    junk indicator 'Number of Doctors' is complete for no year.
    """
    rng = np.random.default_rng(42)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["Area Name", "Indicator Name", "2010", "2011", "2012"])
    per_indicator = {
        "HDI": (66.0, 0.4), "GDP": (45.0, 3.0), "NPP": (120.0, 8.0),
        "NIU": (30.0, 4.0), "NL": (55.0, 5.0), "NP": (90.0, 10.0),
    }
    for r, region in enumerate(HAND_REGIONS):
        for indicator, (base, spread) in per_indicator.items():
            cells = []
            for year in (2010, 2011, 2012):
                if (indicator, year) in COMPLETE_PAIRS:
                    cells.append(f"{base + spread * r + 0.01 * (year - 2000):.2f}")
                elif r == (year % len(HAND_REGIONS)):
                    cells.append("")  # the hole that breaks completeness
                else:
                    cells.append(f"{base + rng.uniform(0, spread):.2f}")
            writer.writerow([region, indicator, *cells])
        doctor_cells = ["" if (r + year) % 2 else str(100 + r)
                        for year in (2010, 2011, 2012)]
        writer.writerow([region, "Number of Doctors", *doctor_cells])
    return buf.getvalue()


def planted_csv(n_regions: int = 120, seed: int = 0) -> str:
    """Learnable planted table: HDI bands separated, predictors echo them.

    Every region is complete for the classification year (2010, all six
    indicators) and the clustering year (2012, HDI+GDP); 2011 is mostly
    blank.  Band edges keep a margin around the 60/70/80 cutoffs so the
    four categories are well separated in feature space.
    """
    rng = np.random.default_rng(seed)
    bands = [(44.0, 57.0), (61.5, 68.5), (71.5, 78.5), (81.5, 93.0)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["Area Name", "Indicator Name", "2010", "2011", "2012"])
    for i in range(n_regions):
        lo, hi = bands[i % 4]
        hdi10 = rng.uniform(lo, hi)
        hdi12 = min(hdi10 + rng.uniform(0.0, 1.5), 94.0)
        gdp10 = 15.0 + 0.8 * hdi10 + rng.uniform(-2.0, 2.0)
        gdp12 = gdp10 * (1.0 + rng.uniform(0.0, 0.12))
        name = f"Kab. {i:03d}, Kota" if i % 9 == 0 else f"Region {i:03d}"
        rows = {
            "HDI": (hdi10, hdi12),
            "GDP": (gdp10, gdp12),
            "NPP": (190.0 - 1.6 * hdi10 + rng.uniform(-3.0, 3.0), None),
            "NIU": (5.0 + 0.9 * hdi10 + rng.uniform(-2.0, 2.0), None),
            "NL": (20.0 + 0.5 * hdi10 + rng.uniform(-1.5, 1.5), None),
            "NP": (60.0 + rng.uniform(-5.0, 5.0), None),
        }
        for indicator, (v10, v12) in rows.items():
            writer.writerow([
                name, indicator, f"{v10:.3f}", "",
                "" if v12 is None else f"{v12:.3f}",
            ])
    return buf.getvalue()


@pytest.fixture
def hand_table_text():
    return hand_csv()


@pytest.fixture
def planted_table_text():
    return planted_csv()


@pytest.fixture
def planted_file(tmp_path):
    path = tmp_path / "indicators.csv"
    path.write_text(planted_csv(), encoding="utf-8")
    return path


@pytest.fixture
def hand_file(tmp_path):
    path = tmp_path / "hand.csv"
    path.write_text(hand_csv(), encoding="utf-8")
    return path
