"""Access to bundled data files (dictionary sample, mini reading dictionary)."""

from __future__ import annotations

from importlib.resources import files

from .moras import ReadingDictionary, parse_reading_dictionary
from .phonology import PronunciationDictionary, parse_pronunciation_dictionary


def data_text(name: str) -> str:
    return files("sv2svt").joinpath("data", name).read_text(encoding="utf-8")


def bundled_dictionary() -> PronunciationDictionary:
    """The bundled CMUdict-format sample (1000 entries)."""
    return parse_pronunciation_dictionary(data_text("cmudict_sample.txt"))


def bundled_readings() -> ReadingDictionary:
    """The bundled mini kanji reading dictionary."""
    return parse_reading_dictionary(data_text("readings_mini.tsv"))
