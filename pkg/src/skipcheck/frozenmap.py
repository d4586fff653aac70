from collections.abc import Mapping


class FrozenMap(Mapping):
    """Immutable, hashable mapping used for stores and variable assignments."""

    __slots__ = ("_d", "_h")

    def __init__(self, *args, **kwargs):
        self._d = dict(*args, **kwargs)
        self._h = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._d == dict(other.items())
        return NotImplemented

    def __repr__(self):
        inner = ", ".join(f"{k}: {v!r}" for k, v in sorted(self._d.items()))
        return f"{{{inner}}}"

    def update(self, updates):
        d = dict(self._d)
        d.update(updates)
        return type(self)(d)

    def __reduce__(self):
        return (type(self), (self._d,))
