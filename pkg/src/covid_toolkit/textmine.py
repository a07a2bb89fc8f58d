"""Symptom text mining: n-gram tokenization, dictionary-driven binary
indicators, and 0-10 min-max prevalence scores.

Free-text symptom descriptions ("Moderate fever 38.5°C, cough, strong
headache") are normalized to lowercase alphanumeric tokens; a symptom
matches when any of its dictionary phrases appears as a contiguous run of
whole tokens, so "cough" never fires inside "coughing".
"""

from __future__ import annotations

import csv
import io
import json
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

_NON_ALNUM = re.compile(r"[^0-9a-z]+")
MAX_PHRASE_WORDS = 4

SEX_VALUES = ("male", "female")
OUTCOME_DIED = "died"
OUTCOME_OTHER = "active_or_recovered"
_DEATH_WORDS = {"died", "death", "dead", "deceased"}


@dataclass(frozen=True)
class PatientRecord:
    """One line-list row; any field except id may be absent (None)."""

    id: str
    age: float | None = None
    sex: str | None = None
    symptom_text: str | None = None
    chronic_disease: bool | None = None
    outcome: str | None = None

    def __post_init__(self):
        if self.age is not None and not 0 <= self.age <= 120:
            raise ValueError(f"age out of range [0, 120]: {self.age}")
        if self.sex is not None and self.sex not in SEX_VALUES:
            raise ValueError(f"sex must be one of {SEX_VALUES}, got {self.sex!r}")
        if self.outcome is not None and self.outcome not in (OUTCOME_DIED,
                                                             OUTCOME_OTHER):
            raise ValueError(f"unknown outcome: {self.outcome!r}")


class SymptomDictionary:
    """Mapping from symptom name to its list of lowercase match phrases.

    Phrases are 1-4 words; no phrase may appear under two symptoms.
    Iteration order (= indicator column order) follows insertion order.
    """

    def __init__(self, phrases_by_symptom: dict[str, list[str]]):
        seen: dict[str, str] = {}
        cleaned: dict[str, tuple[str, ...]] = {}
        for symptom, phrases in phrases_by_symptom.items():
            if not phrases:
                raise ValueError(f"symptom {symptom!r} has no phrases")
            kept = []
            for phrase in phrases:
                if not phrase or phrase != phrase.lower():
                    raise ValueError(
                        f"phrase {phrase!r} under {symptom!r} must be non-empty lowercase"
                    )
                words = phrase.split()
                if not 1 <= len(words) <= MAX_PHRASE_WORDS:
                    raise ValueError(
                        f"phrase {phrase!r} must have 1-{MAX_PHRASE_WORDS} words"
                    )
                canon = " ".join(words)
                if canon in seen:
                    raise ValueError(
                        f"phrase {canon!r} appears under both {seen[canon]!r}"
                        f" and {symptom!r}"
                    )
                seen[canon] = symptom
                kept.append(canon)
            cleaned[symptom] = tuple(kept)
        self._phrases = cleaned

    @property
    def symptoms(self) -> tuple[str, ...]:
        return tuple(self._phrases)

    def phrases(self, symptom: str) -> tuple[str, ...]:
        return self._phrases[symptom]

    def items(self):
        return self._phrases.items()

    def __len__(self) -> int:
        return len(self._phrases)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "SymptomDictionary":
        """Load from a JSON config; the packaged default covers the symptoms
        used by the risk model."""
        if path is None:
            text = resources.files("covid_toolkit.data").joinpath(
                "symptom_dictionary.json").read_text()
        else:
            text = Path(path).read_text()
        return cls(json.loads(text))


@dataclass(frozen=True)
class IndicatorMatrix:
    """Patients x symptoms binary matrix with named columns."""

    columns: tuple[str, ...]
    rows: np.ndarray
    record_ids: tuple[str, ...]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=int)
        if rows.ndim != 2:
            rows = rows.reshape(-1, len(self.columns))
        object.__setattr__(self, "rows", rows)
        if rows.shape[1] != len(self.columns):
            raise ValueError("row width does not match column names")
        if rows.shape[0] != len(self.record_ids):
            raise ValueError("row count does not match record ids")
        if rows.size and not np.isin(rows, (0, 1)).all():
            raise ValueError("indicator entries must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    def column_sums(self) -> np.ndarray:
        return self.rows.sum(axis=0)


def normalize_text(text: str) -> str:
    """Lowercase, replace non-alphanumeric runs with single spaces, trim."""
    return _NON_ALNUM.sub(" ", text.lower()).strip()


def tokenize(text: str) -> list[str]:
    normalized = normalize_text(text)
    return normalized.split() if normalized else []


def tokenize_ngrams(text: str, n: int) -> list[str]:
    """Overlapping n-grams of the normalized tokens; empty when the text has
    fewer than n tokens."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    tokens = tokenize(text)
    return [" ".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]


def ngram_frequencies(corpus, n_max: int = 4) -> list[tuple[int, str, int]]:
    """(n, gram, count) rows for every n-gram with n = 1..n_max across the
    corpus, sorted by count descending then gram."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    counts: Counter[tuple[int, str]] = Counter()
    for text in corpus:
        for n in range(1, n_max + 1):
            counts.update((n, gram) for gram in tokenize_ngrams(text, n))
    rows = [(n, gram, count) for (n, gram), count in counts.items()]
    rows.sort(key=lambda row: (-row[2], row[1], row[0]))
    return rows


def match_symptoms(text: str, dictionary: SymptomDictionary) -> dict[str, int]:
    """Indicator per symptom: 1 iff any dictionary phrase occurs as a
    contiguous whole-token run of the normalized text."""
    tokens = tokenize(text)
    present: set[str] = set()
    for n in range(1, MAX_PHRASE_WORDS + 1):
        present.update(" ".join(tokens[i:i + n])
                       for i in range(len(tokens) - n + 1))
    return {
        symptom: int(any(phrase in present for phrase in phrases))
        for symptom, phrases in dictionary.items()
    }


def build_indicator_matrix(records, dictionary: SymptomDictionary,
                           include_missing_text: bool = False) -> IndicatorMatrix:
    """One row per record via `match_symptoms`.

    Records without symptom text are excluded by default (absence of notes
    is not absence of symptoms); pass include_missing_text=True to keep them
    as all-zero rows, e.g. when row alignment with the record list matters.
    """
    columns = dictionary.symptoms
    kept_ids: list[str] = []
    rows: list[list[int]] = []
    for record in records:
        if record.symptom_text is None:
            if not include_missing_text:
                continue
            rows.append([0] * len(columns))
        else:
            indicators = match_symptoms(record.symptom_text, dictionary)
            rows.append([indicators[c] for c in columns])
        kept_ids.append(record.id)
    matrix = np.asarray(rows, dtype=int) if rows else np.empty((0, len(columns)), int)
    return IndicatorMatrix(columns=columns, rows=matrix,
                           record_ids=tuple(kept_ids))


def minmax_scale(sums) -> tuple[np.ndarray, bool]:
    """Min-max rescale of per-symptom sums onto [0, 10].

    Returns (scores, degenerate); when every sum is equal the scores are all
    zero and the degenerate flag is set.
    """
    arr = np.asarray(sums, dtype=float)
    if arr.size < 2:
        raise ValueError(f"need at least 2 sums, got {arr.size}")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        return np.zeros(arr.size), True
    return (arr - lo) / (hi - lo) * 10.0, False


def load_line_list(source: str | Path) -> list[PatientRecord]:
    """Read an nCoV2019-style line-list CSV (columns id, age, sex, symptoms,
    chronic_disease_binary, outcome; header-based lookup).

    Unparseable field values become absent (None) rather than failing the
    whole file; line lists are notoriously dirty.
    """
    path = Path(source)
    text = path.read_text() if path.exists() else str(source)
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ValueError("empty line list")
    fields = {name.strip().lower(): name for name in reader.fieldnames}
    if "id" not in fields:
        raise ValueError("line list needs an 'id' column")

    def cell(row, key):
        col = fields.get(key)
        value = (row.get(col) or "").strip() if col else ""
        return value or None

    records = []
    for row in reader:
        age_raw = cell(row, "age")
        try:
            age = float(age_raw) if age_raw is not None else None
            if age is not None and not 0 <= age <= 120:
                age = None
        except ValueError:
            age = None
        sex = cell(row, "sex")
        sex = sex.lower() if sex else None
        if sex not in SEX_VALUES:
            sex = None
        outcome_raw = cell(row, "outcome")
        if outcome_raw is None:
            outcome = None
        elif outcome_raw.lower() in _DEATH_WORDS:
            outcome = OUTCOME_DIED
        else:
            outcome = OUTCOME_OTHER
        chronic_raw = cell(row, "chronic_disease_binary")
        if chronic_raw is None:
            chronic = None
        else:
            chronic = chronic_raw.strip().lower() in ("1", "true", "yes")
        records.append(PatientRecord(
            id=str(cell(row, "id")),
            age=age,
            sex=sex,
            symptom_text=cell(row, "symptoms"),
            chronic_disease=chronic,
            outcome=outcome,
        ))
    return records
