from __future__ import annotations

import functools
from typing import IO, TYPE_CHECKING, Any, Callable, Optional, Tuple, TypeVar

from ..errors import UsageError
from ..model import QuadSystem, builtin_system, parse_system
from ..runner import JobRunner
from .command import Command
from .config import RunConfig

if TYPE_CHECKING:
    from .app import App

__all__ = ("Context",)

R = TypeVar("R")


class Context:
    """
    The state of one command invocation.

    Attributes:
        app (cremona.cli.App): The application running the command.
        config (cremona.cli.RunConfig): The validated flags.
        runner (cremona.runner.JobRunner): The pool independent jobs run on.
        command (Optional[cremona.cli.Command]): The command being run.

    """

    def __init__(self, app: App, config: RunConfig, runner: JobRunner, stdout: IO[str]) -> None:
        self.command: Optional[Command] = None
        self.app = app
        self.config = config
        self.runner = runner
        self._stdout = stdout
        self._written = False

    def __repr__(self) -> str:
        return f"<Context command={self.config.command!r} valid={self.valid!r}>"

    @property
    def valid(self) -> bool:
        return self.command is not None

    @functools.cached_property
    def system(self) -> QuadSystem:
        """
        The system named by `--system` or read from `--model-file`.

        Raises:
            [cremona.errors.UsageError][] if the model file cannot be read.

        """
        config = self.config
        if config.system is not None:
            return builtin_system(config.system, config.param_dict)

        assert config.model_file is not None
        try:
            text = config.model_file.read_text()
        except OSError as error:
            raise UsageError(f"cannot read {config.model_file}: {error.strerror}") from None

        return parse_system(text, name=config.model_file.stem)

    @property
    def x0(self) -> Tuple[Any, ...]:
        assert self.config.x0 is not None
        if len(self.config.x0) != self.system.dimension:
            raise UsageError(f"--x0 has {len(self.config.x0)} entries, the system has dimension {self.system.dimension}")

        return self.config.x0

    async def run(self, func: Callable[..., R], *args: Any, **kwargs: Any) -> R:
        return await self.runner.run(func, *args, **kwargs)

    def emit(self, text: str) -> None:
        """
        Writes output to `--out`, or to standard output.
        """
        if self.config.out is None:
            self._stdout.write(text)
        else:
            with self.config.out.open("a" if self._written else "w") as stream:
                stream.write(text)

        self._written = True
