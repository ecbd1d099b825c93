"""Named codebooks for CJK label encoding and MovieLens ID embedding.

CJK label-encoding presets use N=21901; pass ``n_classes=20901`` to get the
size of the actual character set instead.  MovieLens presets map UserID
``u`` (1..6040) and MovieID ``v`` (1..3952) to IDs ``u-1`` and ``v-1``.
"""

from __future__ import annotations

from typing import Callable

from .codes import (
    Codebook,
    build_coo,
    build_ecoc,
    build_gauss_cc,
    build_polynomial_cc,
    build_remainder_cc,
    build_rmp,
)

CJK_N = 21901
CJK_CHARACTERS = 20901
ML_USERS = 6040
ML_MOVIES = 3952

CJK_REMAINDER_MODULI = [173, 191, 157, 181, 193, 199]
CJK_GAUSS_MODULI = ["10+9i", "10-9i", "13+2i", "13-2i", "12+7i", "12-7i"]

ML_USER_REM6 = [83, 89, 97, 101, 103, 109]
ML_ITEM_REM6 = [67, 71, 73, 79, 83, 101]
ML_USER_GAUSS = ["8+5i", "8-5i", "9+4i", "9-4i", "10+1i", "10+3i"]
ML_USER_REM15 = [19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49, 53, 59, 67]
ML_ITEM_REM14 = [17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49, 53]


def _cjk(n):
    return CJK_N if n is None else n


def _ml_user(n):
    return ML_USERS if n is None else n


def _ml_item(n):
    return ML_MOVIES if n is None else n


PRESETS: dict[str, tuple[str, Callable[[int | None], Codebook]]] = {
    "cjk-polynomial-2": (
        "polynomial CC, p=181, k=2, points 0..1",
        lambda n: build_polynomial_cc(_cjk(n), k=2, p=181, r=2),
    ),
    "cjk-polynomial-6": (
        "polynomial CC, p=181, k=2, points 0..5",
        lambda n: build_polynomial_cc(_cjk(n), k=2, p=181, r=6),
    ),
    "cjk-remainder-2": (
        "remainder CC, moduli 173,191",
        lambda n: build_remainder_cc(_cjk(n), k=2, moduli=CJK_REMAINDER_MODULI[:2]),
    ),
    "cjk-remainder-6": (
        "remainder CC, moduli 173,191,157,181,193,199",
        lambda n: build_remainder_cc(_cjk(n), k=2, moduli=CJK_REMAINDER_MODULI),
    ),
    "cjk-gauss-2": (
        "Gauss CC, moduli 10+9i,10-9i",
        lambda n: build_gauss_cc(_cjk(n), k=2, moduli=CJK_GAUSS_MODULI[:2]),
    ),
    "cjk-gauss-6": (
        "Gauss CC, moduli 10+-9i,13+-2i,12+-7i",
        lambda n: build_gauss_cc(_cjk(n), k=2, moduli=CJK_GAUSS_MODULI),
    ),
    "cjk-ecoc-15": (
        "15-bit binary ECOC",
        lambda n: build_ecoc(_cjk(n), 15),
    ),
    "ml-user-coo": (
        "582-bit cut-off one-hot for UserID",
        lambda n: build_coo(_ml_user(n), 582),
    ),
    "ml-item-coo": (
        "474-bit cut-off one-hot for MovieID",
        lambda n: build_coo(_ml_item(n), 474),
    ),
    "ml-user-rmp": (
        "RM(12,1) punctured to 582 bits for UserID",
        lambda n: build_rmp(_ml_user(n), 12, 582, seed=0),
    ),
    "ml-item-rmp": (
        "RM(11,1) punctured to 474 bits for MovieID",
        lambda n: build_rmp(_ml_item(n), 11, 474, seed=0),
    ),
    "ml-user-method1": (
        "two-hot remainder 289,293 (582 bits)",
        lambda n: build_remainder_cc(_ml_user(n), moduli=[289, 293]),
    ),
    "ml-item-method1": (
        "two-hot remainder 235,239 (474 bits)",
        lambda n: build_remainder_cc(_ml_item(n), moduli=[235, 239]),
    ),
    "ml-user-method2": (
        "three-hot remainder 193,194,195 (582 bits)",
        lambda n: build_remainder_cc(_ml_user(n), moduli=[193, 194, 195]),
    ),
    "ml-item-method2": (
        "three-hot remainder 157,158,159 (474 bits)",
        lambda n: build_remainder_cc(_ml_item(n), moduli=[157, 158, 159]),
    ),
    "ml-user-method3": (
        "six-hot polynomial over F_97 (582 bits)",
        lambda n: build_polynomial_cc(_ml_user(n), k=2, p=97, r=6),
    ),
    "ml-item-method3": (
        "six-hot polynomial over F_73 (438 bits)",
        lambda n: build_polynomial_cc(_ml_item(n), k=2, p=73, r=6),
    ),
    "ml-user-method4": (
        "six-hot remainder 83,89,97,101,103,109 (582 bits)",
        lambda n: build_remainder_cc(_ml_user(n), moduli=ML_USER_REM6),
    ),
    "ml-item-method4": (
        "six-hot remainder 67,71,73,79,83,101 (474 bits)",
        lambda n: build_remainder_cc(_ml_item(n), moduli=ML_ITEM_REM6),
    ),
    "ml-user-method5": (
        "six-hot Gauss 8+-5i,9+-4i,10+i,10+3i (582 bits)",
        lambda n: build_gauss_cc(_ml_user(n), moduli=ML_USER_GAUSS),
    ),
    "ml-item-method5": (
        "six-hot remainder 67,71,73,79,83,101 (474 bits)",
        lambda n: build_remainder_cc(_ml_item(n), moduli=ML_ITEM_REM6),
    ),
    "ml-user-method6": (
        "15-hot remainder 19..67 (582 bits)",
        lambda n: build_remainder_cc(_ml_user(n), moduli=ML_USER_REM15),
    ),
    "ml-item-method6": (
        "14-hot remainder 17..53 (473 bits)",
        lambda n: build_remainder_cc(_ml_item(n), moduli=ML_ITEM_REM14),
    ),
}


def preset_names() -> list[str]:
    return list(PRESETS)


def build_preset(name: str, n_classes: int | None = None) -> Codebook:
    try:
        _, factory = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None
    return factory(n_classes)
