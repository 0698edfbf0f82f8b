import csv
import json
import os
from fractions import Fraction
from typing import Iterable, Sequence


def prepare_output(path: str) -> str:
    """Create the parent directory of an output file and return its absolute path."""
    if os.path.isdir(path):
        raise ValueError(f"output path is a directory: {path!r}")
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    return os.path.abspath(path)


def format_value(value) -> str:
    """CSV cell text: floats with 17 significant digits, rationals as num/den."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float) or hasattr(value, "dtype") and value.dtype.kind == "f":
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    path = prepare_output(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    return path


def write_json(path: str, data: dict) -> str:
    path = prepare_output(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed JSON in {path!r}: {e}") from e


def write_text(path: str, text: str) -> str:
    path = prepare_output(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return path
