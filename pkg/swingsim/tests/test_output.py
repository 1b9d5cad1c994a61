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

import json
import math
import os

import fixtures  # type: ignore
import numpy as np

from typing import Any, Dict, Iterable, Optional, Sequence, TextIO

from swingsim.tests import sinks

from swingsim import exceptions
from swingsim import output


class CsvWriterTest(fixtures.TestWithFixtures):
    def setUp(self) -> None:
        self.out = self.useFixture(sinks.BufferFixture())
        self.writer = output.CsvWriter()

    def test_header_and_rows(self) -> None:
        self.writer.write_table(self.out.stream, ['t', 'omega'],
                                [[0.0, 376.5], [0.5, 0.1]])
        self.assertEqual('t,omega\n0.0,376.5\n0.5,0.1\n',
                         self.out.text())

    def test_cells(self) -> None:
        self.writer.write_table(self.out.stream,
                                ['a', 'b', 'c', 'd', 'e'],
                                [[None, True, False, 'converged', 3]])
        self.assertEqual('a,b,c,d,e\n,true,false,converged,3\n',
                         self.out.text())

    def test_numpy_scalars(self) -> None:
        self.writer.write_table(self.out.stream, ['x', 'n', 'b'],
                                [[np.float64(0.1), np.int64(7),
                                  np.bool_(True)]])
        self.assertEqual('x,n,b\n0.1,7,true\n', self.out.text())

    def test_metadata_ignored(self) -> None:
        self.writer.write_table(self.out.stream, ['x'], [[1.0]],
                                {'model': 'improved-load'})
        self.assertEqual('x\n1.0\n', self.out.text())

    def test_write_file(self) -> None:
        directory = self.useFixture(sinks.OutputDirFixture())
        path = self.writer.write_file(directory.path, 'run', ['x'], [[2.5]])
        self.assertEqual(os.path.join(directory.path, 'run.csv'), path)
        self.assertEqual('x\n2.5\n', directory.read('run.csv'))


class JsonWriterTest(fixtures.TestWithFixtures):
    def setUp(self) -> None:
        self.out = self.useFixture(sinks.BufferFixture())

    def test_document(self) -> None:
        output.JsonWriter().write_table(
            self.out.stream, ['t', 'omega'],
            [[0.0, np.float64(377.0)], [1.0, math.inf]],
            {'model': 'improved-load', 'verdict': 'converged'})
        document = json.loads(self.out.text())
        self.assertEqual({
            'model': 'improved-load',
            'verdict': 'converged',
            'columns': ['t', 'omega'],
            'rows': [[0.0, 377.0], [1.0, None]],
        }, document)

    def test_filename(self) -> None:
        self.assertEqual('a_b.json', output.JsonWriter().filename('a_b'))


class DumpJsonTest(fixtures.TestWithFixtures):
    def setUp(self) -> None:
        self.out = self.useFixture(sinks.BufferFixture())

    def test_sorted_and_terminated(self) -> None:
        output.dump_json({'b': 1, 'a': [np.float64(0.5), None]},
                         self.out.stream)
        text = self.out.text()
        self.assertTrue(text.endswith('}\n'))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual({'a': [0.5, None], 'b': 1}, json.loads(text))

    def test_non_finite_is_null(self) -> None:
        output.dump_json({'Delta': math.nan, 'c': -math.inf},
                         self.out.stream)
        self.assertEqual({'Delta': None, 'c': None},
                         json.loads(self.out.text()))

    def test_file(self) -> None:
        directory = self.useFixture(sinks.OutputDirFixture())
        path = output.write_json_file(
            os.path.join(directory.path, 'k.json'), {'k': 1})
        self.assertEqual(['k.json'], directory.listing())
        with open(path, encoding='utf-8') as f:
            self.assertEqual({'k': 1}, json.load(f))


class _Writer(output.OutputWriter):
    extension = 'txt'

    def write_table(self, stream: TextIO,
                    columns: Sequence[str],
                    rows: Iterable[Sequence[output.Cell]],
                    metadata: Optional[Dict[str, Any]] = None) -> None:
        stream.write(' '.join(columns))


class GetWriterTest(fixtures.TestWithFixtures):
    def test_by_name(self) -> None:
        self.assertIsInstance(output.get_writer('csv'), output.CsvWriter)
        self.assertIsInstance(output.get_writer('JSON'), output.JsonWriter)

    def test_unknown_name(self) -> None:
        self.assertRaises(exceptions.InvalidConfig, output.get_writer, 'xml')

    def test_instance(self) -> None:
        writer = _Writer()
        self.assertIs(writer, output.get_writer(writer))

    def test_factory(self) -> None:
        self.assertIsInstance(output.get_writer(_Writer), _Writer)

    def test_invalid(self) -> None:
        self.assertRaises(TypeError, output.get_writer, 42)
        self.assertRaises(TypeError, output.get_writer, lambda: 'csv')
