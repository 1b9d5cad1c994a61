#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

import abc
import csv
import json
import math
import os

import typing
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, TextIO

import numpy as np

from swingsim import exceptions


__all__ = ['OutputWriter', 'CsvWriter', 'JsonWriter', 'get_writer',
           'dump_json', 'write_json_file']


Cell = typing.Union[None, bool, int, float, str]


def _json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Mapping):
        return {str(k): _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def dump_json(document: Any, stream: TextIO) -> None:
    """Write a JSON document with sorted keys. Non-finite floats become
    null."""
    json.dump(_json_value(document), stream, sort_keys=True, indent=2,
              allow_nan=False)
    stream.write('\n')


def write_json_file(path: str, document: Any) -> str:
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        dump_json(document, f)
    return path


class OutputWriter(metaclass=abc.ABCMeta):
    """
    Abstract base class for table writers.

    A subclass writes a table of named columns, one row per sample or grid
    cell, in a particular file format.
    """

    extension = ''

    @abc.abstractmethod
    def write_table(self, stream: TextIO,
                    columns: Sequence[str],
                    rows: Iterable[Sequence[Cell]],
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        """Write the table to ``stream``."""

    def filename(self, stem: str) -> str:
        return f'{stem}.{self.extension}'

    def write_file(self, directory: str, stem: str,
                   columns: Sequence[str],
                   rows: Iterable[Sequence[Cell]],
                   metadata: Optional[Dict[str, Any]] = None) -> str:
        """Write the table to a file in ``directory`` and return its path."""
        path = os.path.join(directory, self.filename(stem))
        with open(path, 'w', encoding='utf-8', newline='') as f:
            self.write_table(f, columns, rows, metadata)
        return path


class CsvWriter(OutputWriter):
    """
    Comma-separated values with a header row.

    Floats are written in their shortest round-trip form and absent values as
    empty fields. Metadata is not written.
    """

    extension = 'csv'

    @staticmethod
    def _cell(value: Cell) -> str:
        if isinstance(value, np.generic):
            value = value.item()
        if value is None:
            return ''
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, float):
            return repr(value)
        return str(value)

    def write_table(self, stream: TextIO,
                    columns: Sequence[str],
                    rows: Iterable[Sequence[Cell]],
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([self._cell(v) for v in row])


class JsonWriter(OutputWriter):
    """A JSON object holding the column names, the rows and any metadata."""

    extension = 'json'

    def write_table(self, stream: TextIO,
                    columns: Sequence[str],
                    rows: Iterable[Sequence[Cell]],
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        document = dict(metadata or {})
        document['columns'] = list(columns)
        document['rows'] = [list(row) for row in rows]
        dump_json(document, stream)


_FORMATS = {
    'csv': CsvWriter,
    'json': JsonWriter,
}


WriterType = typing.Union[OutputWriter,
                          typing.Callable[[], OutputWriter],
                          str]


def get_writer(writer: WriterType) -> OutputWriter:
    """Return the writer for a format name, a writer factory or a writer."""
    if isinstance(writer, OutputWriter):
        return writer

    if isinstance(writer, str):
        try:
            return _FORMATS[writer.lower()]()
        except KeyError:
            raise exceptions.InvalidConfig(
                f'unknown output format "{writer}"')

    if callable(writer):
        out = writer()
        if isinstance(out, OutputWriter):
            return out

    raise TypeError(f'Invalid output writer: {writer!r}')
