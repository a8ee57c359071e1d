"""Two-level garment taxonomy with a configurable keep/drop list.

The default ships as a YAML file next to this module: 14 whole-body
categories plus 32 part categories, of which 21 are kept and 11 dropped.
Builds may point at their own file to change what counts as a garment.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

DEFAULT_TAXONOMY_PATH = Path(__file__).parent / "taxonomy.yaml"

WHOLE_BODY = "whole_body"
GARMENT_PART = "garment_part"


class TaxonomyError(ValueError):
    pass


@dataclass(frozen=True)
class Taxonomy:
    whole_body: frozenset[str]
    parts_kept: frozenset[str]
    parts_removed: frozenset[str]

    def __post_init__(self):
        groups = [self.whole_body, self.parts_kept, self.parts_removed]
        for i, a in enumerate(groups):
            for b in groups[i + 1 :]:
                if a & b:
                    raise TaxonomyError(f"categories in multiple groups: {sorted(a & b)}")

    def level(self, category: str) -> str | None:
        category = category.lower()
        if category in self.whole_body:
            return WHOLE_BODY
        if category in self.parts_kept or category in self.parts_removed:
            return GARMENT_PART
        return None

    def keeps(self, category: str) -> bool:
        return category.lower() not in self.parts_removed

    @property
    def part_categories(self) -> frozenset[str]:
        return self.parts_kept | self.parts_removed


def load_taxonomy(path: str | Path | None = None) -> Taxonomy:
    data = yaml.safe_load(Path(path or DEFAULT_TAXONOMY_PATH).read_text())
    try:
        return Taxonomy(
            whole_body=frozenset(c.lower() for c in data["whole_body"]),
            parts_kept=frozenset(c.lower() for c in data["parts_kept"]),
            parts_removed=frozenset(c.lower() for c in data["parts_removed"]),
        )
    except KeyError as exc:
        raise TaxonomyError(f"taxonomy file missing key {exc}") from exc


DEFAULT_TAXONOMY = load_taxonomy()
