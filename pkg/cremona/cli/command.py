from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable, Coroutine, List, Optional, Tuple, Union

if TYPE_CHECKING:
    from .context import Context

__all__ = (
    "Command",
    "check",
    "command",
)

Check = Tuple[Callable[["Context"], bool], str]


class Command:
    """
    A subcommand of the command line.

    Attributes:
        name (str): The subcommand name, e.g. `find-steps`.
        callback (Callable[..., Coroutine]): The coroutine function run with a [cremona.cli.Context][].
        checks (List[Tuple[Callable[[Context], bool], str]]): Preconditions on the flags and
            the message shown when one fails.
        help (str): The first line of the callback's docstring.

    """

    def __init__(self, name: str, callback: Callable[..., Coroutine]) -> None:
        self.checks: List[Check] = list(reversed(getattr(callback, "__checks__", [])))
        self.callback = callback
        self.name = name
        self.help = (callback.__doc__ or "").strip().split("\n")[0]

    def __repr__(self) -> str:
        return f"<Command name={self.name!r}>"

    def __str__(self) -> str:
        return self.name

    async def __call__(self, *args, **kwargs) -> Any:
        return await self.callback(*args, **kwargs)


def check(predicate: Callable[[Context], bool], message: str) -> Callable[..., Union[Command, Callable]]:
    """
    Adds a precondition to a command; checks run in the order they are written.

    Parameters:
        predicate (Callable[[Context], bool]): Returns whether the command may run.
        message (str): The single-line explanation shown when it may not.

    """

    def inner(func: Union[Command, Callable]) -> Union[Command, Callable]:
        if isinstance(func, Command):
            func.checks.insert(0, (predicate, message))
        else:
            func.__checks__ = [*getattr(func, "__checks__", []), (predicate, message)]  # type: ignore

        return func

    return inner


def command(name: Optional[str] = None) -> Callable[..., Command]:
    def inner(func: Callable[..., Coroutine]) -> Command:
        return Command(name or func.__name__.replace("_", "-"), func)

    return inner
