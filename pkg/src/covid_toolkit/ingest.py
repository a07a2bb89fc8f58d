"""Fetch, parse, cache, and aggregate CSSE-format daily-report and
time-series CSVs, with last-known-good fallback.

The upstream daily reports live at a date-templated URL; one CSV per calendar
day.  Successfully fetched files are stored in a filesystem cache next to a
``LATEST`` marker naming the most recent file that parsed cleanly, so a dead
network or a corrupt upload degrades to the last good snapshot instead of an
empty page.
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import logging
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Callable

import requests
from filelock import FileLock

from .transform import TimeSeries

logger = logging.getLogger(__name__)

CSSE_DAILY_REPORT_TEMPLATE = (
    "https://raw.githubusercontent.com/CSSEGISandData/COVID-19/master/"
    "csse_covid_19_data/csse_covid_19_daily_reports/{date}.csv"
)

FRESH = "fresh"
CACHED = "cached"

_COUNTRY_HEADERS = ("country_region", "country/region", "country", "region")
_PROVINCE_HEADERS = ("province_state", "province/state", "province", "state")
_COUNT_HEADERS = {
    "confirmed": ("confirmed",),
    "deaths": ("deaths",),
    "recovered": ("recovered",),
}


class ParseError(ValueError):
    """A CSV did not conform to the expected daily-report layout."""


class NoDataError(RuntimeError):
    """Fetch failed and the cache holds no usable fallback."""


@dataclass(frozen=True)
class ReportDate:
    """Calendar date formatted as the zero-padded MM-DD-YYYY URL component."""

    year: int
    month: int
    day: int

    def __post_init__(self):
        try:
            datetime.date(self.year, self.month, self.day)
        except ValueError as exc:
            raise ValueError(
                f"invalid report date {self.year}-{self.month}-{self.day}: {exc}"
            ) from None

    def mmddyyyy(self) -> str:
        return f"{self.month:02d}-{self.day:02d}-{self.year:04d}"

    @classmethod
    def parse(cls, text: str) -> "ReportDate":
        parts = text.strip().split("-")
        if len(parts) != 3:
            raise ValueError(f"expected MM-DD-YYYY, got {text!r}")
        month, day, year = (int(p) for p in parts)
        return cls(year=year, month=month, day=day)

    @classmethod
    def from_date(cls, d: datetime.date) -> "ReportDate":
        return cls(year=d.year, month=d.month, day=d.day)

    def to_date(self) -> datetime.date:
        return datetime.date(self.year, self.month, self.day)


@dataclass(frozen=True)
class RegionSnapshot:
    """One region's cumulative counts from a single daily report."""

    region: str
    confirmed: int
    deaths: int
    recovered: int
    population: int | None = None
    country: str | None = None
    province: str | None = None

    def __post_init__(self):
        if not self.region:
            raise ValueError("region name must be non-empty")
        for name in ("confirmed", "deaths", "recovered"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if self.population is not None and self.population <= 0:
            raise ValueError(f"population must be positive, got {self.population}")


def load_region_aliases(path: str | Path | None = None) -> dict[str, str]:
    """Exact-match alias table for canonical region names (e.g. US -> USA)."""
    if path is None:
        text = resources.files("covid_toolkit.data").joinpath(
            "region_aliases.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def load_population_table(path: str | Path | None = None) -> dict[str, int]:
    """Two-column region,population CSV as a lookup dict."""
    if path is None:
        text = resources.files("covid_toolkit.data").joinpath(
            "population.csv").read_text()
    else:
        text = Path(path).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or \
            {"region", "population"} - {f.strip() for f in reader.fieldnames}:
        raise ParseError("population table needs 'region,population' header")
    return {row["region"].strip(): int(row["population"]) for row in reader}


def build_daily_report_url(date: ReportDate,
                           template: str = CSSE_DAILY_REPORT_TEMPLATE) -> str:
    """Daily-report URL with the zero-padded date substituted."""
    return template.format(date=date.mmddyyyy())


def _find_column(fieldnames, candidates) -> str | None:
    lowered = {name.strip().lower(): name for name in fieldnames}
    for cand in candidates:
        if cand in lowered:
            return lowered[cand]
    return None


def _parse_count(raw: str | None) -> int:
    if raw is None or raw.strip() == "":
        return 0
    value = int(float(raw))
    if value < 0:
        raise ValueError(f"negative count {raw!r}")
    return value


def parse_daily_report(text: str, mode: str = "lenient",
                       aliases: dict[str, str] | None = None
                       ) -> list[RegionSnapshot]:
    """Parse a daily-report CSV into one snapshot per row.

    In lenient mode (the default) malformed rows are logged and skipped;
    in strict mode the first malformed row raises a ParseError naming its
    row number.  Empty count cells are read as zero in both modes.
    """
    if mode not in ("lenient", "strict"):
        raise ValueError(f"unknown parse mode: {mode!r}")
    if aliases is None:
        aliases = load_region_aliases()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("empty document: no CSV header")
    country_col = _find_column(reader.fieldnames, _COUNTRY_HEADERS)
    count_cols = {
        metric: _find_column(reader.fieldnames, names)
        for metric, names in _COUNT_HEADERS.items()
    }
    missing = [m for m, col in count_cols.items() if col is None]
    if country_col is None:
        missing.insert(0, "country")
    if missing:
        raise ParseError(f"missing required column(s): {', '.join(missing)}")
    province_col = _find_column(reader.fieldnames, _PROVINCE_HEADERS)

    snapshots = []
    for row_number, row in enumerate(reader, start=2):
        try:
            country = (row[country_col] or "").strip()
            if not country:
                raise ValueError("empty region name")
            country = aliases.get(country, country)
            province = (row[province_col] or "").strip() if province_col else ""
            counts = {m: _parse_count(row[col]) for m, col in count_cols.items()}
        except (ValueError, KeyError) as exc:
            if mode == "strict":
                raise ParseError(f"row {row_number}: {exc}") from None
            logger.warning("skipping malformed row %d: %s", row_number, exc)
            continue
        snapshots.append(RegionSnapshot(
            region=province or country,
            country=country,
            province=province or None,
            **counts,
        ))
    return snapshots


def aggregate_to_region(snapshots: list[RegionSnapshot],
                        level: str = "country") -> list[RegionSnapshot]:
    """Sum counts over rows sharing a region key, sorted by confirmed
    descending.

    `level="country"` groups by country; `level="state"` groups by
    province/state and drops rows that carry no province.
    """
    if level not in ("country", "state"):
        raise ValueError(f"unknown aggregation level: {level!r}")
    groups: dict[str, list[RegionSnapshot]] = {}
    for snap in snapshots:
        if level == "country":
            key = snap.country or snap.region
        else:
            if snap.province is None:
                continue
            key = snap.province
        groups.setdefault(key, []).append(snap)

    aggregated = []
    for key, members in groups.items():
        populations = [m.population for m in members]
        population = (sum(populations)
                      if all(p is not None for p in populations) else None)
        aggregated.append(RegionSnapshot(
            region=key,
            country=key if level == "country" else members[0].country,
            province=key if level == "state" else None,
            confirmed=sum(m.confirmed for m in members),
            deaths=sum(m.deaths for m in members),
            recovered=sum(m.recovered for m in members),
            population=population,
        ))
    aggregated.sort(key=lambda s: (-s.confirmed, s.region))
    return aggregated


def attach_population(snapshots: list[RegionSnapshot],
                      table: dict[str, int]) -> list[RegionSnapshot]:
    """Join a population lookup onto snapshots; unknown regions stay None."""
    return [
        replace(s, population=table[s.region]) if s.region in table else s
        for s in snapshots
    ]


@dataclass(frozen=True)
class SnapshotCache:
    """Filesystem cache of raw daily-report CSVs with a latest-good marker.

    ``<dir>/MM-DD-YYYY.csv`` holds raw files; ``<dir>/LATEST`` names the most
    recent one that parsed successfully.  Updates to the marker take an
    advisory lock so concurrent fetchers cannot interleave writes.
    """

    directory: Path

    def __post_init__(self):
        object.__setattr__(self, "directory", Path(self.directory))
        self.directory.mkdir(parents=True, exist_ok=True)

    @property
    def _marker(self) -> Path:
        return self.directory / "LATEST"

    def file_for(self, date: ReportDate) -> Path:
        return self.directory / f"{date.mmddyyyy()}.csv"

    def store(self, date: ReportDate, text: str) -> Path:
        """Store a raw CSV that already parsed successfully and advance the
        latest-good marker to it."""
        target = self.file_for(date)
        with FileLock(str(self._marker) + ".lock"):
            target.write_text(text)
            self._marker.write_text(target.name)
        return target

    def latest_good(self) -> tuple[str, str] | None:
        """(filename, raw text) of the newest good file, or None if empty."""
        if not self._marker.exists():
            return None
        name = self._marker.read_text().strip()
        path = self.directory / name
        if not path.exists():
            return None
        return name, path.read_text()


def default_fetcher(url: str, timeout: float = 15.0) -> str:
    """Fetch text over HTTP(S); plain paths and file:// URLs read locally."""
    if url.startswith(("http://", "https://")):
        response = requests.get(url, timeout=timeout)
        response.raise_for_status()
        return response.text
    if url.startswith("file://"):
        return Path(url[len("file://"):]).read_text()
    return Path(url).read_text()


def fetch_with_fallback(date: ReportDate, cache: SnapshotCache,
                        fetcher: Callable[[str], str] | None = None,
                        template: str = CSSE_DAILY_REPORT_TEMPLATE,
                        mode: str = "lenient",
                        ) -> tuple[list[RegionSnapshot], str]:
    """Fetch and parse one daily report, falling back to the cache.

    On success the raw CSV is cached, the latest-good marker advances, and
    the snapshots come back tagged ``fresh``.  On any fetch or parse failure
    the latest-good cache entry is served tagged ``cached``.  A failure with
    an empty cache raises NoDataError.
    """
    if fetcher is None:
        fetcher = default_fetcher
    url = build_daily_report_url(date, template=template)
    try:
        text = fetcher(url)
        snapshots = parse_daily_report(text, mode=mode)
    except Exception as exc:
        logger.warning("fetch of %s failed (%s); trying cache", url, exc)
        fallback = cache.latest_good()
        if fallback is None:
            raise NoDataError(
                f"no data available: fetch of {url} failed ({exc}) "
                "and the cache is empty"
            ) from exc
        name, cached_text = fallback
        logger.info("serving cached report %s", name)
        return parse_daily_report(cached_text, mode=mode), CACHED
    cache.store(date, text)
    return snapshots, FRESH


def parse_time_series_csv(text: str, region: str, metric: str,
                          aliases: dict[str, str] | None = None) -> TimeSeries:
    """Extract one country's cumulative series from a CSSE-format
    time-series CSV (date columns named M/D/YY), summing province rows."""
    if aliases is None:
        aliases = load_region_aliases()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("empty document: no CSV header")
    country_col = _find_column(reader.fieldnames, _COUNTRY_HEADERS)
    if country_col is None:
        raise ParseError("missing country column")

    date_cols = []
    for name in reader.fieldnames:
        try:
            month, day, year = (int(p) for p in name.strip().split("/"))
        except ValueError:
            continue
        date_cols.append((datetime.date(2000 + year, month, day), name))
    if not date_cols:
        raise ParseError("no date columns found (expected M/D/YY headers)")
    date_cols.sort()

    totals = [0.0] * len(date_cols)
    found = False
    for row in reader:
        country = aliases.get((row[country_col] or "").strip(),
                              (row[country_col] or "").strip())
        if country != region:
            continue
        found = True
        for i, (_, col) in enumerate(date_cols):
            totals[i] += _parse_count(row[col])
    if not found:
        raise ParseError(f"region {region!r} not present in time-series CSV")
    return TimeSeries(region=region, metric=metric,
                      dates=tuple(d for d, _ in date_cols), values=totals)
