from __future__ import annotations

import asyncio
import logging
import sys
from typing import IO, Callable, Dict, List, Optional, Sequence, Type, TypeVar

from ..errors import CheckFailed, CremonaException
from ..runner import JobRunner
from .command import Command
from .config import RunConfig, build_parser
from .context import Context

__all__ = ("App", "Handler", "app", "main")

logger = logging.getLogger(__name__)

CMD = TypeVar("CMD", bound=Command)


class Handler:
    """
    Runs a command inside a context manager that turns errors into a single-line diagnostic
    and an exit code; anything that is not a cremona error counts as bad input (exit 2).
    """

    def __init__(self, ctx: Context, stderr: IO[str]) -> None:
        self.context = ctx
        self.stderr = stderr
        self.exit_code = 0

    async def invoke(self) -> None:
        assert self.context.command is not None

        command = self.context.command
        for predicate, message in [*self.context.app.checks, *command.checks]:
            if not predicate(self.context):
                raise CheckFailed(f"{command.name}: {message}")

        await command(self.context)

    def __enter__(self) -> Handler:
        return self

    def __exit__(self, *exception) -> bool:
        _, error, _ = exception

        if isinstance(error, CremonaException):
            self.exit_code = error.exit_code
            self.stderr.write(f"cremona: error: {error.message or error}\n")
            logger.debug("COMMAND FAILED", exc_info=error)
            return True

        if isinstance(error, Exception):
            self.exit_code = 2
            self.stderr.write(f"cremona: error: {type(error).__name__}: {error}\n")
            logger.error(f"COMMAND CRASHED: {self.context.config.command} raised {type(error).__name__}")
            logger.debug("COMMAND CRASHED", exc_info=error)
            return True

        return False


class App:
    """
    The command-line application: a registry of commands plus the global checks.

    Attributes:
        commands (Dict[str, cremona.cli.Command]): The registered commands.
        checks (List[Tuple[Callable[[Context], bool], str]]): Checks run before every command.

    """

    def __init__(self) -> None:
        self.commands: Dict[str, Command] = {}
        self.checks: List = []

    def command(self, name: Optional[str] = None, *, cls: Type[CMD] = Command) -> Callable[..., CMD]:  # type: ignore
        def inner(func) -> CMD:
            command = cls(name or func.__name__.replace("_", "-"), func)
            self.commands[command.name] = command

            return command

        return inner

    def check(self, message: str) -> Callable:
        def inner(func: Callable[[Context], bool]) -> Callable[[Context], bool]:
            self.checks.append((func, message))
            return func

        return inner

    def get_command(self, name: str) -> Optional[Command]:
        return self.commands.get(name)

    async def execute(self, config: RunConfig, stdout: IO[str], stderr: IO[str]) -> int:
        runner = JobRunner(config.threads)
        ctx = Context(self, config, runner, stdout)
        ctx.command = self.get_command(config.command)

        try:
            with Handler(ctx, stderr) as handler:
                await handler.invoke()
        finally:
            runner.close()

        return handler.exit_code

    def run(
        self,
        argv: Optional[Sequence[str]] = None,
        *,
        stdout: Optional[IO[str]] = None,
        stderr: Optional[IO[str]] = None,
    ) -> int:
        """
        Parses the arguments and runs the command.

        Returns:
            The exit code: 0 on success, 2 on a usage error, 3 on a computation error,
            4 when a resource budget runs out.

        """
        stdout = stdout or sys.stdout
        stderr = stderr or sys.stderr
        parser = build_parser({name: command.help for name, command in self.commands.items()})

        try:
            namespace = parser.parse_args(argv)
        except SystemExit as exit:
            return int(exit.code or 0)

        _configure_logging(namespace.verbose, stderr)

        try:
            config = RunConfig.from_namespace(namespace)
        except CremonaException as error:
            stderr.write(f"cremona: error: {error.message}\n")
            return error.exit_code

        return asyncio.run(self.execute(config, stdout, stderr))


def _configure_logging(verbose: int, stream: IO[str]) -> None:
    level = logging.DEBUG if verbose > 1 else logging.INFO if verbose == 1 else logging.WARNING
    root = logging.getLogger("cremona")
    root.setLevel(level)

    for handler in [handler for handler in root.handlers if getattr(handler, "_cremona", False)]:
        root.removeHandler(handler)

    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._cremona = True  # type: ignore
    root.addHandler(handler)


app = App()


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(app.run(argv))
