from typing import Any, Callable, Optional

from timeit import default_timer

from decorator import decorate


class Timer:
    """Measures a block (``with``) or every call of a function (decorator)."""

    def __init__(self, callback: Callable[[float], None]) -> None:
        self._callback = callback
        self._start: Optional[float] = None
        self.elapsed: Optional[float] = None

    def _new_timer(self) -> "Timer":
        return self.__class__(self._callback)

    def __enter__(self) -> "Timer":
        self._start = default_timer()
        return self

    def __exit__(self, typ: Any, value: Any, traceback: Any) -> None:
        assert self._start is not None
        # default_timer is not guaranteed monotonic on every platform.
        self.elapsed = max(default_timer() - self._start, 0.0)
        self._callback(self.elapsed)

    def __call__(self, f: Callable[..., Any]) -> Callable[..., Any]:
        def wrapped(func: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
            # A fresh instance per call keeps the timer reentrant.
            with self._new_timer():
                return func(*args, **kwargs)

        return decorate(f, wrapped)
