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

import io
import json
import os

import fixtures  # type: ignore

import typing


class BufferFixture(fixtures.Fixture):
    """An in-memory text stream."""

    def _setUp(self) -> None:
        self.stream: typing.TextIO = io.StringIO()
        self.addCleanup(self.stream.close)

    def text(self) -> str:
        return typing.cast(io.StringIO, self.stream).getvalue()


class OutputDirFixture(fixtures.Fixture):
    """A scratch directory for scenario outputs."""

    def _setUp(self) -> None:
        self.path: str = self.useFixture(fixtures.TempDir()).path

    def listing(self) -> typing.List[str]:
        return sorted(os.listdir(self.path))

    def read(self, name: str) -> str:
        with open(os.path.join(self.path, name), encoding='utf-8') as f:
            return f.read()


class ScenarioFileFixture(fixtures.Fixture):
    """A scenario file holding a document, or raw text if given a string."""

    def __init__(self, document: typing.Any):
        super().__init__()
        self._document = document

    def _setUp(self) -> None:
        directory = self.useFixture(fixtures.TempDir()).path
        self.path = os.path.join(directory, 'scenario.json')
        with open(self.path, 'w', encoding='utf-8') as f:
            if isinstance(self._document, str):
                f.write(self._document)
            else:
                json.dump(self._document, f, indent=2)
