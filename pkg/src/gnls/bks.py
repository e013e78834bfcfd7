"""Best-known-solution registry.

Costs ship as a plain ``name<TAB>cost`` table bundled with the package;
unknown instances are explicit misses, never zero.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path


class UnknownInstanceError(KeyError):
    pass


class BksRegistry:
    def __init__(self, table: dict[str, int] | None = None):
        self._table: dict[str, int] = dict(table or {})

    @classmethod
    def from_text(cls, text: str) -> "BksRegistry":
        table = {}
        for ln, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise ValueError(f"bks table line {ln}: expected 'name<TAB>cost'")
            name, cost = parts[0], int(parts[1])
            if cost <= 0:
                raise ValueError(f"bks table line {ln}: cost must be positive")
            table[name] = cost
        return cls(table)

    @classmethod
    def from_file(cls, path) -> "BksRegistry":
        return cls.from_text(Path(path).read_text())

    @classmethod
    def bundled(cls) -> "BksRegistry":
        text = resources.files("gnls").joinpath("data/bks.tsv").read_text()
        return cls.from_text(text)

    def lookup(self, name: str) -> int:
        try:
            return self._table[name]
        except KeyError:
            raise UnknownInstanceError(f"no best-known cost recorded for {name!r}") from None

    def get(self, name: str) -> int | None:
        return self._table.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def __len__(self) -> int:
        return len(self._table)
