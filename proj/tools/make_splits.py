#!/usr/bin/env python3
"""Regenerates the class-split files under data/splits/.

COCO-Stuff ids follow the 0-based stuffthingmaps convention (thing id =
COCO category id - 1, stuff ids 91..181, 255 = void). Cityscapes ids are
the 19 train ids.
"""

import json
import random
from pathlib import Path

COCO_CATEGORY_IDS = [
    1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 14, 15, 16, 17, 18, 19, 20, 21,
    22, 23, 24, 25, 27, 28, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42,
    43, 44, 46, 47, 48, 49, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60, 61,
    62, 63, 64, 65, 67, 70, 72, 73, 74, 75, 76, 77, 78, 79, 80, 81, 82, 84,
    85, 86, 87, 88, 89, 90,
]
THINGS = [c - 1 for c in COCO_CATEGORY_IDS]
STUFF = list(range(91, 182))

# person bicycle car motorcycle airplane bus train boat bird cat dog horse
# sheep cow bottle chair couch potted-plant dining-table tv
VOC_THINGS = [0, 1, 2, 3, 4, 5, 6, 8, 15, 16, 17, 18, 19, 20, 43, 61, 62, 63, 66, 71]

# Frequent everyday objects: person car truck traffic-light bench backpack
# cat dog handbag sports-ball bottle cup pizza chair dining-table tv
# cell-phone sink book clock
MANUAL_THINGS = [0, 2, 7, 9, 14, 26, 16, 17, 30, 36, 43, 46, 58, 61, 66, 71, 76, 80, 83, 84]

CITYSCAPES = list(range(19))


def split(name, known, unknown):
    known = sorted(known)
    unknown = sorted(unknown)
    assert not set(known) & set(unknown)
    return {"name": name, "known": known, "unknown": unknown}


def main():
    out = Path(__file__).resolve().parent.parent / "data" / "splits"
    out.mkdir(parents=True, exist_ok=True)
    all_coco = THINGS + STUFF
    rng = random.Random(20240101)
    random_unknown = rng.sample(THINGS, 29) + rng.sample(STUFF, 31)
    splits = {
        "coco_voc_111_60": split("coco_voc_111_60", VOC_THINGS + STUFF,
                                 [t for t in THINGS if t not in VOC_THINGS]),
        "coco_manual_111_60": split("coco_manual_111_60", MANUAL_THINGS + STUFF,
                                    [t for t in THINGS if t not in MANUAL_THINGS]),
        "coco_random_111_60": split("coco_random_111_60",
                                    [c for c in all_coco if c not in random_unknown],
                                    random_unknown),
        "cityscapes_manual_16_3": split("cityscapes_manual_16_3",
                                        [c for c in CITYSCAPES if c not in (13, 14, 15)],
                                        [13, 14, 15]),
        "cityscapes_manual_13_6": split("cityscapes_manual_13_6",
                                        [c for c in CITYSCAPES if c not in (2, 7, 8, 13, 14, 15)],
                                        [2, 7, 8, 13, 14, 15]),
    }
    for name, doc in splits.items():
        (out / f"{name}.json").write_text(json.dumps(doc) + "\n")


if __name__ == "__main__":
    main()
