"""Pointer-sliced code clone detection with bound-constraint verification."""

from __future__ import annotations

from pathlib import Path

__version__ = "0.1.0"

CORPORA = Path(__file__).resolve().parent / "corpora"
REPORT_SCHEMA = Path(__file__).resolve().parent / "schema" / "report.schema.json"


def corpus_path(name: str) -> Path:
    """Location of a bundled corpus (``micro`` or ``fp_seeded``)."""
    return CORPORA / name
