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

"""
The ``swingsim`` command.

    swingsim run <PRESET | --config FILE> [--out DIR] [--format csv|json]
    swingsim sweep <PRESET | --config FILE> ...
    swingsim levelset <PRESET | --config FILE> ...
    swingsim constants <PRESET | --config FILE>

The exit code is 0 on success, 1 for an invalid configuration, 2 if a basin
sweep finds a cell inside a region of attraction estimate that does not
converge and 3 for a numerical failure.
"""

import argparse
import logging
import signal
import sys

import types
import typing
from typing import Callable, Dict, List, NoReturn, Optional, TextIO, Type

from swingsim import exceptions
from swingsim import output
from swingsim import scenarios


__all__ = ['ExitStatus', 'main']


LOG = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_ACCEPTANCE = 2
EXIT_NUMERICAL = 3


def _signal_exit_code(signum: signal.Signals) -> int:
    """
    Return the exit code corresponding to a received signal.

    Conventionally, when a program exits due to a signal its exit code is 128
    plus the signal number.
    """
    return 128 + int(signum)


class ExitStatus:
    """
    A context manager that reports errors from a command and determines the
    exit code of the process.

    Errors in the configuration, acceptance violations and numerical failures
    are reported on the error stream and suppressed. Any other exception
    propagates.
    """

    def __init__(self, output_stream: Optional[TextIO] = None,
                 error_stream: Optional[TextIO] = None):
        self._out = sys.stdout if output_stream is None else output_stream
        self._err = sys.stderr if error_stream is None else error_stream
        self._exit_code = 0

    def __enter__(self) -> TextIO:
        return self._out

    def __exit__(self,
                 exc_type: Optional[Type[BaseException]],
                 exc: Optional[BaseException],
                 traceback: Optional[types.TracebackType]) -> bool:
        if exc is None:
            self._flush_output()
        return self._process_exception(exc)

    def _flush_output(self) -> None:
        try:
            if not self._out.closed:
                self._out.flush()
        except BrokenPipeError:
            self._exit_code = _signal_exit_code(signal.SIGPIPE)
            try:
                # Close now so that interpreter shutdown does not try to
                # flush the stream again
                self._out.close()
            except BrokenPipeError:
                pass

    def _report(self, exc: BaseException, code: int) -> bool:
        self._exit_code = code
        self._err.write(f'swingsim: error: {exc}\n')
        return True

    def _process_exception(self, exc: Optional[BaseException]) -> bool:
        if exc is None:
            return False
        if isinstance(exc, BrokenPipeError):
            # The consumer of the output has gone away
            self._exit_code = _signal_exit_code(signal.SIGPIPE)
            return True
        if isinstance(exc, KeyboardInterrupt):
            self._exit_code = _signal_exit_code(signal.SIGINT)
            return True
        if isinstance(exc, SystemExit) and isinstance(exc.code, int):
            self._exit_code = exc.code
            return False
        if isinstance(exc, exceptions.AcceptanceViolation):
            return self._report(exc, EXIT_ACCEPTANCE)
        if isinstance(exc, ValueError):
            return self._report(exc, EXIT_CONFIG)
        if isinstance(exc, ArithmeticError):
            return self._report(exc, EXIT_NUMERICAL)
        self._exit_code = 1
        return False

    def exit_code(self) -> int:
        """Return the exit code for the process."""
        return self._exit_code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise exceptions.InvalidConfig(message)


def _load_spec(args: argparse.Namespace,
               *outputs: scenarios.Output) -> scenarios.ScenarioSpec:
    """Load the scenario, replacing its outputs with ``outputs`` if given."""
    if args.config is not None:
        document = scenarios.read_document(args.config)
    else:
        document = scenarios.preset_document(args.preset)
    if outputs and isinstance(document, dict):
        document = dict(document, outputs=[o.value for o in outputs])
    return scenarios.spec_from_document(document)


def _run(spec: scenarios.ScenarioSpec, args: argparse.Namespace,
         out: TextIO) -> None:
    try:
        result = scenarios.run_scenario(spec, args.out, args.format)
    except exceptions.AcceptanceViolation:
        LOG.error('Scenario %s failed its acceptance check', spec.name)
        raise
    for line in result.summary_lines():
        out.write(line + '\n')


def _cmd_run(args: argparse.Namespace, out: TextIO) -> None:
    _run(_load_spec(args), args, out)


def _cmd_sweep(args: argparse.Namespace, out: TextIO) -> None:
    _run(_load_spec(args, scenarios.Output.VERDICT_GRID), args, out)


def _cmd_levelset(args: argparse.Namespace, out: TextIO) -> None:
    _run(_load_spec(args, scenarios.Output.LEVEL_SET), args, out)


def _cmd_constants(args: argparse.Namespace, out: TextIO) -> None:
    spec = _load_spec(args, scenarios.Output.CONSTANTS)
    output.dump_json(scenarios.scenario_constants(spec), out)


_COMMANDS: Dict[str, typing.Tuple[Callable[[argparse.Namespace, TextIO],
                                           None], str]] = {
    'run': (_cmd_run, 'run a scenario and write its outputs'),
    'sweep': (_cmd_sweep, 'sample the basin of attraction on a grid'),
    'levelset': (_cmd_levelset,
                 'sample the boundary of the region of attraction estimate'),
    'constants': (_cmd_constants, 'print the analytic constants as JSON'),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', action='count', default=0,
                        help='log progress (repeat for debug output)')

    parser = _ArgumentParser(
        prog='swingsim',
        description='Simulate and analyse the improved swing equation.')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    for name, (_, help_text) in _COMMANDS.items():
        command = commands.add_parser(name, parents=[common],
                                      help=help_text, description=help_text)
        source = command.add_mutually_exclusive_group(required=True)
        source.add_argument('preset', nargs='?', metavar='PRESET',
                            help='one of ' + ', '.join(
                                scenarios.preset_names()))
        source.add_argument('--config', metavar='FILE',
                            help='a JSON scenario file')
        if name != 'constants':
            command.add_argument('--out', default='.', metavar='DIR',
                                 help='directory for the output files')
            command.add_argument('--format', choices=('csv', 'json'),
                                 default='csv',
                                 help='format of the tables written')
    return parser


def _configure_logging(verbosity: int) -> None:
    level = (logging.WARNING if verbosity <= 0
             else logging.INFO if verbosity == 1
             else logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    status = ExitStatus()
    with status as out:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        function, _ = _COMMANDS[args.command]
        function(args, out)
    return status.exit_code()
