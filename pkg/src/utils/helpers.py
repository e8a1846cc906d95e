"""
Utility helper functions shared by the engine, analysis and CLI.
"""
import csv
import json
import re
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence, Tuple


def format_ratio(numerator: int, denominator: int) -> str:
    """
    Format an integer pair as ``"num/den"`` without reducing it.

    Args:
        numerator: Numerator
        denominator: Denominator

    Returns:
        The pair joined by a slash
    """
    return f"{numerator}/{denominator}"


def parse_ratio(text: str) -> Tuple[int, int]:
    """
    Parse ``"num/den"`` (or a bare integer) into an integer pair.

    Args:
        text: Text to parse

    Returns:
        Tuple of (numerator, denominator)

    Raises:
        ValueError: If the text is not a ratio of integers or the denominator is not positive
    """
    match = re.fullmatch(r'\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?', text)
    if not match:
        raise ValueError(f"Not a ratio of integers: {text!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator < 1:
        raise ValueError(f"Denominator must be positive: {text!r}")
    return numerator, denominator


def parse_int_list(text: str) -> List[int]:
    """
    Parse a comma or whitespace separated list of integers.

    Args:
        text: Text such as ``"3, 5 -1"``

    Returns:
        List of integers (empty for blank input)
    """
    parts = [p for p in re.split(r'[,\s]+', text.strip()) if p]
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"Not a list of integers: {text!r}") from None


def format_decimal(value: Fraction, digits: int = 12) -> str:
    """
    Render an exact rational with a fixed number of significant digits.

    Args:
        value: Exact value
        digits: Significant digits

    Returns:
        Decimal string
    """
    with localcontext() as ctx:
        ctx.prec = digits
        result = Decimal(value.numerator) / Decimal(value.denominator)
    return format(result, "g") if result != 0 else "0"


def ensure_parent_dir(path: str) -> Path:
    """
    Create the parent directory of an output path if needed.

    Args:
        path: Output file path

    Returns:
        Path object for the file
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """
    Write a CSV file with a header row and LF line endings.

    Args:
        path: Output file path
        header: Column names
        rows: Row values in header order

    Returns:
        Number of data rows written
    """
    target = ensure_parent_dir(path)
    count = 0
    with open(target, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
            count += 1
    return count


def write_json(path: str, data: Any) -> None:
    """
    Write JSON with sorted keys so reruns produce identical bytes.

    Args:
        path: Output file path
        data: JSON-serialisable data
    """
    target = ensure_parent_dir(path)
    with open(target, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def read_text(path: str) -> Optional[str]:
    """
    Read a UTF-8 text file.

    Args:
        path: File path

    Returns:
        File contents, or None if the file does not exist
    """
    target = Path(path)
    if not target.exists():
        return None
    return target.read_text(encoding="utf-8")
