"""Report serialization: provenance blocks, deterministic JSON, and CSV with
an embedded provenance comment line.

Every artifact the CLI writes embeds the effective config, SHA-256 checksums
of its inputs, and the run seed, so a report is traceable to exactly the
data and knobs that produced it.  Identical config + inputs + seed must
yield byte-identical JSON/CSV.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path


def sha256_of_file(path: str | Path) -> str:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def provenance_block(config: dict, inputs: dict[str, str | Path],
                     seed: int | None = None) -> dict:
    """Config, input checksums, and seed for embedding in every report."""
    return {
        "config": dict(sorted(config.items())),
        "input_checksums": {
            name: sha256_of_file(path) for name, path in sorted(inputs.items())
        },
        "seed": seed,
    }


def dump_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_json(path: str | Path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(dump_json(payload))
    return path


def write_csv(path: str | Path, header: list[str], rows,
              provenance: dict | None = None) -> Path:
    """CSV artifact with the provenance block as a single leading comment
    line (# provenance: {...}); readers should skip lines starting with #."""
    buffer = io.StringIO()
    if provenance is not None:
        buffer.write("# provenance: " + json.dumps(provenance, sort_keys=True))
        buffer.write("\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path = Path(path)
    path.write_text(buffer.getvalue())
    return path


def forecast_payload(result, order, aic: float) -> dict:
    """Wire format for a forecast: point/bounds arrays plus the order and
    AIC of the model that produced them."""
    return {
        "point": [float(v) for v in result.point],
        "lower95": [float(v) for v in result.lower95],
        "upper95": [float(v) for v in result.upper95],
        "order": {"p": order.p, "d": order.d, "q": order.q},
        "aic": float(aic),
    }
