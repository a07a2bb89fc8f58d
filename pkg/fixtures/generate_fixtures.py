#!/usr/bin/env python3
"""Regenerate the committed fixture CSVs. Deterministic: fixed seed, stable
ordering, no timestamps. Run from anywhere; files land next to this script.

- daily_report_03-14-2021.csv: CSSE-style daily report for 10 countries,
  with US and UK split into province rows that sum to the country totals.
- time_series_confirmed_global.csv: CSSE-style cumulative series (two
  synthetic waves) for USA (two province rows) and Brazil.
- patients.csv: 735-row line list. The 715 rows with recorded sex and
  outcome cross-tabulate to exactly [[299, 132], [213, 71]]
  (male/female x active_or_recovered/died); ages and symptom texts are
  synthetic, with some fields deliberately missing.
"""

from __future__ import annotations

import csv
import datetime
from pathlib import Path

import numpy as np

HERE = Path(__file__).parent

COUNTRY_TOTALS = [
    # country, confirmed, deaths, recovered (recovered 0 where unreported)
    ("Brazil", 11483370, 278229, 10113487),
    ("India", 11385339, 158725, 11007352),
    ("Russia", 4341381, 90558, 3949891),
    ("France", 4131874, 90583, 279752),
    ("Italy", 3223142, 102145, 2589731),
    ("Spain", 3183704, 72258, 150376),
    ("Turkey", 2879390, 29489, 2701076),
    ("Germany", 2578842, 73463, 2368995),
]


def write_daily_report() -> None:
    rows = [
        # US splits (sum: 29438775 / 534888 / 0); "US" exercises the alias table
        ("California", "US", 3654123, 56789, 0),
        ("New York", "US", 25784652, 478099, 0),
        # UK splits (sum: 4271710 / 125753 / 11972)
        ("England", "United Kingdom", 3700000, 110000, 10000),
        ("Scotland", "United Kingdom", 571710, 15753, 1972),
    ]
    rows += [("", country, c, d, r) for country, c, d, r in COUNTRY_TOTALS]
    path = HERE / "daily_report_03-14-2021.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Province_State", "Country_Region", "Last_Update",
                         "Confirmed", "Deaths", "Recovered"])
        for province, country, confirmed, deaths, recovered in rows:
            writer.writerow([province, country, "2021-03-15 05:22:00",
                             confirmed, deaths, recovered])
    print(f"wrote {path}")


def _wave(t: np.ndarray, center: float, width: float, height: float) -> np.ndarray:
    return height * np.exp(-0.5 * ((t - center) / width) ** 2)


def write_time_series(days: int = 240) -> None:
    rng = np.random.default_rng(20210314)
    t = np.arange(days)
    start = datetime.date(2020, 1, 22)
    dates = [start + datetime.timedelta(days=int(i)) for i in range(days)]
    headers = [f"{d.month}/{d.day}/{d.year % 100}" for d in dates]

    def cumulative(increment_mean: np.ndarray) -> np.ndarray:
        noise = rng.normal(1.0, 0.15, size=days)
        inc = np.maximum(0, np.round(increment_mean * noise)).astype(int)
        inc[:30] = np.maximum(0, np.round(_wave(t[:30], 30, 6, 8))).astype(int)
        return np.cumsum(inc)

    usa = cumulative(_wave(t, 95, 18, 28000.0) + _wave(t, 200, 25, 52000.0))
    # split USA across two provinces; shares must re-sum to the total
    usa_a = (usa * 0.6).astype(int)
    usa_b = usa - usa_a
    brazil = cumulative(_wave(t, 120, 22, 18000.0) + _wave(t, 215, 30, 40000.0))

    path = HERE / "time_series_confirmed_global.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Province/State", "Country/Region", "Lat", "Long"]
                        + headers)
        writer.writerow(["California", "US", "36.1", "-119.7"]
                        + usa_a.tolist())
        writer.writerow(["New York", "US", "42.2", "-74.9"] + usa_b.tolist())
        writer.writerow(["", "Brazil", "-14.2", "-51.9"] + brazil.tolist())
    print(f"wrote {path}")


# symptom pools: (phrase, probability among died, probability among others)
SYMPTOM_POOL = [
    ("fever", 0.62, 0.50),
    ("cough", 0.50, 0.45),
    ("headache", 0.18, 0.30),
    ("pneumonia", 0.48, 0.08),
    ("fatigue", 0.35, 0.28),
    ("shortness of breath", 0.38, 0.07),
    ("sore throat", 0.10, 0.22),
    ("runny nose", 0.05, 0.18),
    ("chest distress", 0.15, 0.04),
    ("diarrhea", 0.12, 0.09),
    ("dizziness", 0.08, 0.05),
    ("malaise", 0.10, 0.08),
    ("myalgia", 0.12, 0.14),
    ("phlegm", 0.15, 0.12),
    ("anorexia", 0.09, 0.04),
]
DECORATIONS = ["mild", "moderate", "severe", "acute", "persistent", "slight"]


def _symptom_text(rng: np.random.Generator, died: bool) -> str:
    phrases = []
    for phrase, p_died, p_other in SYMPTOM_POOL:
        if rng.random() < (p_died if died else p_other):
            if rng.random() < 0.3:
                phrase = f"{rng.choice(DECORATIONS)} {phrase}"
            phrases.append(phrase)
    if not phrases:
        return "asymptomatic; tested positive"
    if "fever" in phrases[0] and rng.random() < 0.5:
        phrases[0] += f" {rng.uniform(37.5, 40.0):.1f}°C"
    return ", ".join(phrases).capitalize()


def write_patients() -> None:
    rng = np.random.default_rng(715)
    # sex x outcome cell counts matching the 2x2 table the demog report checks
    cells = [("male", "active_or_recovered", 299), ("male", "died", 132),
             ("female", "active_or_recovered", 213), ("female", "died", 71)]
    rows = []
    for sex, outcome, count in cells:
        for _ in range(count):
            died = outcome == "died"
            age = rng.normal(70, 12) if died else rng.normal(48, 14)
            age = float(np.clip(round(age, 0), 1, 100))
            age_cell = "" if rng.random() < 0.04 else f"{age:.0f}"
            text = "" if rng.random() < 0.08 else _symptom_text(rng, died)
            chronic = int(rng.random() < (0.45 if died else 0.20))
            outcome_cell = "death" if died else rng.choice(
                ["recovered", "stable", "discharged"])
            rows.append([age_cell, sex, text, chronic, outcome_cell])
    # extra dirty rows: missing outcome or sex, so filters earn their keep
    for _ in range(12):
        age = f"{np.clip(round(rng.normal(50, 15)), 1, 100):.0f}"
        rows.append([age, rng.choice(["male", "female"]),
                     _symptom_text(rng, False), 0, ""])
    for _ in range(8):
        rows.append(["", "", _symptom_text(rng, False), "", "recovered"])

    order = rng.permutation(len(rows))
    path = HERE / "patients.csv"
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "age", "sex", "symptoms",
                         "chronic_disease_binary", "outcome"])
        for new_id, idx in enumerate(order, start=1):
            writer.writerow([f"P{new_id:04d}"] + rows[idx])
    print(f"wrote {path} ({len(rows)} rows)")


if __name__ == "__main__":
    write_daily_report()
    write_time_series()
    write_patients()
