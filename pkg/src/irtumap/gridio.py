"""Plain-text grid and key-value formats, with atomic writes.

Grid files start with ``rows cols unit``; unit is ``K`` or ``C`` for
temperatures and ``U`` for U-value maps (optionally followed by the setting
name and a 0/1 film-correction flag). Then come ``rows`` lines of ``cols``
whitespace-separated numbers, ``NA`` marking a masked cell.
"""

from __future__ import annotations

import contextlib
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    ConfigurationError,
    HeaderError,
    NonPhysicalTemperatureError,
    RasterParseError,
    RowLengthError,
    TokenError,
)
from .pipeline import ComputationSetting, UValueMap
from .raster import Grid, TemperatureRaster

CELSIUS_OFFSET = 273.15
TEMPERATURE_UNITS = ("K", "C")
MASK_TOKEN = "NA"


def _read_lines(path):
    try:
        return Path(path).read_text().splitlines()
    except OSError as exc:
        raise RasterParseError(f"cannot read file: {exc.strerror}", path=path) from None


def _parse_grid(path, expect_units):
    lines = _read_lines(path)
    numbered = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise HeaderError("empty file, expected header 'rows cols unit'", path=path, line=1)
    hline, header = numbered[0]
    tokens = header.split()
    if len(tokens) < 3:
        raise HeaderError("expected header 'rows cols unit'", path=path, line=hline)
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise HeaderError("rows and cols must be integers", path=path, line=hline) from None
    if rows < 1 or cols < 1:
        raise HeaderError("rows and cols must be >= 1", path=path, line=hline)
    unit = tokens[2]
    if unit not in expect_units:
        raise HeaderError(
            f"unit {unit!r} not one of {', '.join(expect_units)}", path=path, line=hline, column=3
        )
    body = numbered[1:]
    if len(body) != rows:
        where = body[rows][0] if len(body) > rows else (body[-1][0] + 1 if body else hline + 1)
        raise RowLengthError(f"expected {rows} data rows, found {len(body)}", path=path, line=where)
    values = np.empty((rows, cols))
    mask = np.zeros((rows, cols), dtype=bool)
    for r, (lineno, line) in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise RowLengthError(f"expected {cols} values, found {len(toks)}", path=path, line=lineno)
        for c, tok in enumerate(toks):
            if tok == MASK_TOKEN:
                mask[r, c] = True
                values[r, c] = np.nan
                continue
            try:
                v = float(tok)
            except ValueError:
                raise TokenError(f"non-numeric token {tok!r}", path=path, line=lineno, column=c + 1) from None
            if not np.isfinite(v):
                raise TokenError(f"non-finite value {tok!r}", path=path, line=lineno, column=c + 1)
            values[r, c] = v
    return tokens, values, mask, body


def load_raster(path, unit: str | None = None) -> TemperatureRaster:
    """Read a temperature grid and return it in kelvin.

    ``unit`` (``"K"`` or ``"C"``), when given, must agree with the header.
    """
    tokens, values, mask, body = _parse_grid(path, TEMPERATURE_UNITS)
    file_unit = tokens[2]
    if unit is not None and unit != file_unit:
        raise HeaderError(f"file declares unit {file_unit!r} but {unit!r} was expected", path=path, line=1, column=3)
    if file_unit == "C":
        values = values + CELSIUS_OFFSET
    bad = (~mask) & (values <= 0)
    if np.any(bad):
        r, c = np.argwhere(bad)[0]
        raise NonPhysicalTemperatureError(
            f"temperature {values[r, c]:.6g} K is not above absolute zero",
            path=path, line=body[r][0], column=c + 1,
        )
    return TemperatureRaster(values, mask)


def load_umap(path) -> UValueMap:
    tokens, values, mask, _ = _parse_grid(path, ("U",))
    setting = ComputationSetting.SURFACE
    film = False
    if len(tokens) > 3:
        try:
            setting = ComputationSetting.parse(tokens[3])
        except ConfigurationError as exc:
            raise HeaderError(str(exc), path=path, line=1, column=4) from None
    if len(tokens) > 4:
        if tokens[4] not in ("0", "1"):
            raise HeaderError("film flag must be 0 or 1", path=path, line=1, column=5)
        film = tokens[4] == "1"
    return UValueMap(Grid(values, mask), setting, film)


def load_grid(path) -> Grid:
    """Any grid file as a bare ``Grid`` (temperatures in kelvin)."""
    lines = _read_lines(path)
    head = next((ln.split() for ln in lines if ln.strip()), [])
    if len(head) >= 3 and head[2] == "U":
        return load_umap(path).grid
    r = load_raster(path)
    return Grid(r.values, r.mask)


def _fmt(v: float) -> str:
    return repr(float(v))


def format_grid(grid: Grid, unit: str, extra: Iterable[str] = ()) -> str:
    header = " ".join([str(grid.rows), str(grid.cols), unit, *extra])
    lines = [header]
    for r in range(grid.rows):
        lines.append(" ".join(
            MASK_TOKEN if grid.mask[r, c] else _fmt(grid.values[r, c]) for c in range(grid.cols)
        ))
    return "\n".join(lines) + "\n"


def format_raster(raster: Grid, unit: str = "K") -> str:
    if unit not in TEMPERATURE_UNITS:
        raise ConfigurationError(f"unknown temperature unit {unit!r}")
    if unit == "C":
        raster = Grid(raster.values - CELSIUS_OFFSET, raster.mask)
    return format_grid(raster, unit)


def format_umap(m: UValueMap) -> str:
    return format_grid(m.grid, "U", [m.setting.value, "1" if m.film_corrected else "0"])


def format_kv(pairs: Mapping[str, object]) -> str:
    out = []
    for key, value in pairs.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = _fmt(value)
        out.append(f"{key}={value}")
    return "\n".join(out) + "\n"


def parse_kv(text: str, source: str = "<kv>") -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment, blank lines ignored."""
    result = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise RasterParseError("expected key=value", path=source, line=lineno)
        key, value = line.split("=", 1)
        result[key.strip()] = value.strip()
    return result


def read_kv(path) -> dict:
    return parse_kv("\n".join(_read_lines(path)), source=str(path))


class AtomicOutputs:
    """Stage several output files and move them into place together on success.

    Nothing is visible at the destination paths until :meth:`commit`; a failure
    before then removes every staged temporary.
    """

    def __init__(self):
        self._staged: list[tuple[str, Path]] = []

    def write_text(self, path, text: str) -> None:
        self.write_bytes(path, text.encode())

    def write_bytes(self, path, data: bytes) -> None:
        path = Path(path)
        parent = path.parent if str(path.parent) else Path(".")
        if not parent.is_dir():
            raise OSError(f"output directory does not exist: {parent}")
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=parent)
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        except BaseException:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
            raise
        self._staged.append((tmp, path))

    def commit(self) -> None:
        for tmp, dest in self._staged:
            os.replace(tmp, dest)
        self._staged = []

    def discard(self) -> None:
        for tmp, _ in self._staged:
            with contextlib.suppress(OSError):
                os.unlink(tmp)
        self._staged = []

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.discard()
        return False


def write_text_atomic(path, text: str) -> None:
    with AtomicOutputs() as out:
        out.write_text(path, text)
