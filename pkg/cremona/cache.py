from __future__ import annotations

import collections
import threading
from typing import Any, Hashable, Optional, TypeVar

__all__ = ("Cache",)

T = TypeVar("T")


class Cache(collections.OrderedDict[Hashable, T]):
    """
    A bounded cache for composed symbolic stages, safe to share between threads.

    Attributes:
        maxlen (Optional[int]): The max amount the cache can hold.

    """

    def __init__(self, maxlen: Optional[int] = None, *args, **kwargs):
        """
        Parameters:
            maxlen (Optional[int]): The max amount the cache can hold.

        """
        self._lock = threading.RLock()
        self.maxlen: Optional[int] = maxlen
        super().__init__(*args, **kwargs)

    def __repr__(self) -> str:
        return f"<Cache maxlen={self.maxlen} size={len(self)}>"

    def __setitem__(self, key: Hashable, value: T) -> None:
        with self._lock:
            if key in self:
                self.move_to_end(key)

            super().__setitem__(key, value)

            if self.maxlen and len(self) > self.maxlen:
                self.popitem(False)

    def __getitem__(self, key: Hashable) -> T:
        with self._lock:
            return super().__getitem__(key)

    def __contains__(self, key: Any) -> bool:
        with self._lock:
            return super().__contains__(key)

    def get(self, key: Hashable, default: Any = None) -> Any:
        with self._lock:
            return super().get(key, default)

    def setdefault(self, key: Hashable, default: Any = None) -> Any:
        with self._lock:
            if key not in self:
                self[key] = default

            return super().__getitem__(key)
