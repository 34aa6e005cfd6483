from __future__ import annotations

import functools
from typing import Iterable, Iterator, Sequence, Tuple

from sympy.polys.domains import QQ, ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from ..errors import UsageError

__all__ = ("VarTable", "STEP", "hat_name")

STEP = "dt"


class VarTable:
    """
    An ordered table of variable names shared by every polynomial of a computation.

    The order fixes the graded-lexicographic monomial order: state variables first,
    then their hatted copies, then the step symbol `dt`.

    Attributes:
        names (Tuple[str, ...]): The variable names in order.
        ring (sympy.polys.rings.PolyRing): The sparse polynomial ring over QQ.
        zz_ring (sympy.polys.rings.PolyRing): The same ring over ZZ, used for gcds.

    """

    def __init__(self, names: Iterable[str]) -> None:
        """
        Parameters:
            names (Iterable[str]): Unique variable names.

        """
        self.names: Tuple[str, ...] = tuple(names)

        if not self.names:
            raise UsageError("a variable table needs at least one name")

        if len(set(self.names)) != len(self.names):
            raise UsageError(f"duplicate variable names in {self.names}")

        self.ring, self.zz_ring = _rings(self.names)

    def __repr__(self) -> str:
        return f"<VarTable names={self.names}>"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VarTable) and other.names == self.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def index(self, name: str) -> int:
        """
        Returns the position of a name.

        Raises:
            [cremona.errors.UsageError][] if the name is not in the table.

        """
        try:
            return self.names.index(name)
        except ValueError:
            raise UsageError(f"unknown variable {name!r} (table is {self.names})") from None

    def indices(self, names: Sequence[str]) -> Tuple[int, ...]:
        return tuple(self.index(name) for name in names)

    @classmethod
    def for_state(cls, state: Sequence[str], *, hats: bool = False) -> VarTable:
        """
        Builds the table of a scheme: state variables, optionally hatted copies, then `dt`.

        Parameters:
            state (Sequence[str]): The state variable names.
            hats (bool): Whether to include the `<name>hat` variables.

        """
        names = list(state)
        if hats:
            names.extend(hat_name(name) for name in state)

        names.append(STEP)
        return cls(names)


@functools.lru_cache(maxsize=256)
def _rings(names: Tuple[str, ...]) -> Tuple[PolyRing, PolyRing]:
    return PolyRing(names, QQ, grlex), PolyRing(names, ZZ, grlex)


def hat_name(name: str) -> str:
    return f"{name}hat"
