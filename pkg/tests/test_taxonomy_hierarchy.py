"""Garment taxonomy and overlap-based part assignment."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lots.sketchy.hierarchy import (
    AnnotationSet,
    GarmentAnnotation,
    HierarchyError,
    assign_parts,
    build_cooccurrence,
)
from lots.sketchy.taxonomy import (
    DEFAULT_TAXONOMY,
    GARMENT_PART,
    WHOLE_BODY,
    Taxonomy,
    load_taxonomy,
)


def rect_mask(h, w, y0, x0, y1, x1):
    m = np.zeros((h, w), dtype=np.uint8)
    m[y0:y1, x0:x1] = 1
    return m


def item(category, mask, attrs=()):
    return GarmentAnnotation(category, WHOLE_BODY, list(attrs), mask)


def part(category, mask, attrs=()):
    return GarmentAnnotation(category, GARMENT_PART, list(attrs), mask)


# -- taxonomy ------------------------------------------------------------------


def test_default_taxonomy_counts():
    assert len(DEFAULT_TAXONOMY.whole_body) == 14
    assert len(DEFAULT_TAXONOMY.parts_kept) == 21
    assert len(DEFAULT_TAXONOMY.parts_removed) == 11
    assert len(DEFAULT_TAXONOMY.part_categories) == 32


def test_taxonomy_separates_levels():
    assert DEFAULT_TAXONOMY.level("dress") == WHOLE_BODY
    assert DEFAULT_TAXONOMY.level("sleeve") == GARMENT_PART
    assert DEFAULT_TAXONOMY.level("umbrella") == GARMENT_PART
    assert DEFAULT_TAXONOMY.level("spaceship") is None
    assert DEFAULT_TAXONOMY.keeps("sleeve")
    for dropped in ("umbrella", "bag", "glasses"):
        assert not DEFAULT_TAXONOMY.keeps(dropped)


def test_taxonomy_rejects_overlapping_lists():
    with pytest.raises(ValueError, match="multiple groups"):
        Taxonomy(whole_body=frozenset({"coat"}), parts_kept=frozenset({"hem"}), parts_removed=frozenset({"hem"}))


def test_taxonomy_loads_from_custom_file(tmp_path):
    f = tmp_path / "tax.yaml"
    f.write_text("version: 1\nwhole_body: [robe]\nparts_kept: [sash]\nparts_removed: [crown]\n")
    tax = load_taxonomy(f)
    assert tax.level("robe") == WHOLE_BODY
    assert tax.keeps("sash") and not tax.keeps("crown")


# -- annotations ----------------------------------------------------------------


def test_annotation_normalizes_category_and_mask():
    a = GarmentAnnotation("Sleeve", GARMENT_PART, [], np.array([[0, 3], [255, 0]]))
    assert a.category == "sleeve"
    assert a.mask.dtype == np.uint8
    assert a.mask.tolist() == [[0, 1], [1, 0]]


def test_annotation_validation():
    with pytest.raises(HierarchyError, match="level"):
        GarmentAnnotation("shirt", "torso", [], np.zeros((2, 2)))
    with pytest.raises(HierarchyError, match="2-D"):
        GarmentAnnotation("shirt", WHOLE_BODY, [], np.zeros((2, 2, 3)))
    with pytest.raises(HierarchyError, match="shapes differ"):
        AnnotationSet("x", [item("shirt", np.zeros((2, 2))), part("hem", np.zeros((3, 3)))])


# -- assignment ----------------------------------------------------------------


def test_larger_overlap_wins():
    # Part overlapping one item by 40 px and another by 90 px goes to the latter.
    shirt = item("shirt", rect_mask(64, 64, 0, 0, 40, 20))
    jacket = item("jacket", rect_mask(64, 64, 0, 20, 40, 50))
    sleeve = part("sleeve", np.zeros((64, 64), dtype=np.uint8))
    sleeve.mask[10:14, 10:20] = 1  # 40 px inside shirt
    sleeve.mask[20:29, 25:35] = 1  # 90 px inside jacket
    h = assign_parts(AnnotationSet("img", [shirt, jacket, sleeve]))
    by_cat = {g.category: g for g in h.garments}
    assert [p.name for p in by_cat["jacket"].parts] == ["sleeve"]
    assert by_cat["shirt"].parts == []


def test_single_candidate_takes_any_overlapping_part():
    dress = item("dress", rect_mask(32, 32, 4, 4, 28, 28))
    bow = part("bow", rect_mask(32, 32, 6, 6, 9, 9))
    h = assign_parts(AnnotationSet("img", [dress, bow]))
    assert [p.name for p in h.garments[0].parts] == ["bow"]


def test_zero_overlap_uses_cooccurrence_over_present_items():
    shirt = item("shirt", rect_mask(32, 32, 0, 0, 10, 10))
    skirt = item("skirt", rect_mask(32, 32, 20, 20, 30, 30))
    collar = part("collar", rect_mask(32, 32, 14, 14, 16, 16))  # touches neither
    from collections import Counter

    cooc = {"collar": Counter({"shirt": 9, "coat": 30})}  # coat absent from image
    h = assign_parts(AnnotationSet("img", [shirt, skirt, collar]), cooccurrence=cooc)
    by_cat = {g.category: g for g in h.garments}
    assert [p.name for p in by_cat["shirt"].parts] == ["collar"]
    assert h.unassigned == []


def test_zero_overlap_without_fallback_is_unassigned(caplog):
    shirt = item("shirt", rect_mask(32, 32, 0, 0, 10, 10))
    collar = part("collar", rect_mask(32, 32, 20, 20, 22, 22))
    with caplog.at_level("WARNING"):
        h = assign_parts(AnnotationSet("img", [shirt, collar]), cooccurrence={})
    assert h.unassigned == ["collar"]
    assert h.garments[0].parts == []
    assert any("co-occurrence" in rec.message for rec in caplog.records)


def test_removed_categories_are_dropped_silently():
    shirt = item("shirt", rect_mask(32, 32, 0, 0, 30, 30))
    bag = part("bag", rect_mask(32, 32, 5, 5, 10, 10))
    umbrella = part("umbrella", rect_mask(32, 32, 12, 12, 20, 20))
    h = assign_parts(AnnotationSet("img", [shirt, bag, umbrella]))
    assert h.garments[0].parts == []
    assert h.unassigned == []


def test_no_whole_body_item_is_an_error():
    with pytest.raises(HierarchyError, match="no whole-body"):
        assign_parts(AnnotationSet("img", [part("hem", rect_mask(8, 8, 0, 0, 2, 2))]))


def test_overlap_tie_breaks_by_item_area_then_name():
    small = item("vest", rect_mask(32, 32, 0, 0, 8, 8))
    big = item("coat", rect_mask(32, 32, 0, 8, 16, 24))
    pocket = part("pocket", np.zeros((32, 32), dtype=np.uint8))
    pocket.mask[2:4, 6:8] = 1  # 4 px in vest
    pocket.mask[2:4, 8:10] = 1  # 4 px in coat
    h = assign_parts(AnnotationSet("img", [small, big, pocket]))
    by_cat = {g.category: g for g in h.garments}
    assert [p.name for p in by_cat["coat"].parts] == ["pocket"]

    # Equal overlap and equal area: lexicographically smaller name wins.
    a = item("blouse", rect_mask(32, 32, 0, 0, 8, 8))
    b = item("cardigan", rect_mask(32, 32, 0, 8, 8, 16))
    hem = part("hem", np.zeros((32, 32), dtype=np.uint8))
    hem.mask[0:2, 6:8] = 1
    hem.mask[0:2, 8:10] = 1
    h2 = assign_parts(AnnotationSet("img", [a, b, hem]))
    by_cat2 = {g.category: g for g in h2.garments}
    assert [p.name for p in by_cat2["blouse"].parts] == ["hem"]
    assert by_cat2["cardigan"].parts == []


def test_region_is_union_of_item_and_assigned_parts():
    shirt = item("shirt", rect_mask(32, 32, 0, 0, 10, 10))
    sleeve = part("sleeve", rect_mask(32, 32, 8, 8, 14, 14))
    h = assign_parts(AnnotationSet("img", [shirt, sleeve]))
    g = h.garments[0]
    expected = np.logical_or(shirt.mask, sleeve.mask)
    assert np.array_equal(g.region.astype(bool), expected)
    assert np.array_equal(g.mask, shirt.mask)


def test_growing_a_losing_mask_without_flipping_argmax_keeps_assignment():
    shirt = item("shirt", rect_mask(64, 64, 0, 0, 20, 20))
    jacket = item("jacket", rect_mask(64, 64, 0, 20, 40, 60))
    zipper = part("zipper", np.zeros((64, 64), dtype=np.uint8))
    zipper.mask[2:4, 18:20] = 1  # 4 px in shirt
    zipper.mask[2:12, 22:32] = 1  # 100 px in jacket
    before = assign_parts(AnnotationSet("img", [shirt, jacket, zipper]))
    shirt_grown = item("shirt", rect_mask(64, 64, 0, 0, 25, 20))  # +100 px, overlap +
    after = assign_parts(AnnotationSet("img", [shirt_grown, jacket, zipper]))
    winners_before = [g.category for g in before.garments if g.parts]
    winners_after = [g.category for g in after.garments if g.parts]
    assert winners_before == winners_after == ["jacket"]


def test_build_cooccurrence_counts_argmax_winners():
    sets = []
    for i in range(3):
        coat = item("coat", rect_mask(16, 16, 0, 0, 10, 10))
        lapel = part("lapel", rect_mask(16, 16, 2, 2, 4, 4))
        sets.append(AnnotationSet(f"i{i}", [coat, lapel]))
    dress = item("dress", rect_mask(16, 16, 0, 0, 10, 10))
    lapel2 = part("lapel", rect_mask(16, 16, 2, 2, 4, 4))
    sets.append(AnnotationSet("j", [dress, lapel2]))
    table = build_cooccurrence(sets)
    assert table["lapel"]["coat"] == 3
    assert table["lapel"]["dress"] == 1
    # removed categories never enter the table
    hat_set = AnnotationSet("k", [item("coat", rect_mask(16, 16, 0, 0, 8, 8)), part("hat", rect_mask(16, 16, 0, 0, 2, 2))])
    assert "hat" not in build_cooccurrence([hat_set])


def _oracle_assign(items, parts_list):
    """Brute-force reference: count intersection pixels one by one."""
    out = {id(it): [] for it in items}
    unassigned = []
    for p in parts_list:
        scores = []
        for it in items:
            count = 0
            for y in range(p.mask.shape[0]):
                for x in range(p.mask.shape[1]):
                    if p.mask[y, x] and it.mask[y, x]:
                        count += 1
            scores.append((count, int(it.mask.sum()), it))
        best = max(
            (s for s in scores if s[0] > 0),
            key=lambda s: (s[0], s[1], tuple(-ord(c) for c in s[2].category)),
            default=None,
        )
        if best is None:
            unassigned.append(p.category)
        else:
            out[id(best[2])].append(p.category)
    return out, unassigned


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10_000))
def test_assignment_matches_pixel_counting_oracle(seed):
    rng = np.random.default_rng(seed)
    size = 24
    whole = ["shirt", "jacket", "skirt"][: int(rng.integers(1, 4))]
    items = []
    for name in whole:
        y0, x0 = rng.integers(0, size - 8, size=2)
        hgt, wid = rng.integers(4, 9, size=2)
        items.append(item(name, rect_mask(size, size, y0, x0, min(size, y0 + hgt), min(size, x0 + wid))))
    parts_list = []
    for name in ["sleeve", "pocket", "hem"][: int(rng.integers(1, 4))]:
        y0, x0 = rng.integers(0, size - 4, size=2)
        parts_list.append(part(name, rect_mask(size, size, y0, x0, min(size, y0 + 3), min(size, x0 + 3))))

    h = assign_parts(AnnotationSet("r", items + parts_list), cooccurrence={})
    expected, expected_unassigned = _oracle_assign(items, parts_list)
    got = {id(it): [p.name for p in g.parts] for it, g in zip(items, h.garments)}
    assert got == expected
    assert h.unassigned == expected_unassigned
