#!/usr/bin/env python3
"""Regenerate src/sv2svt/data/cmudict_sample.txt.

The sample is a CMUdict-format fixture: a hand-curated block of common
English words plus deterministically generated pseudo-words, 1000 entry
lines in total.  Rerunning this script reproduces the file byte for byte.
"""

import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "sv2svt" / "data" / "cmudict_sample.txt"

CURATED = """\
ABOUT  AH0 B AW1 T
ABOVE  AH0 B AH1 V
AFTER  AE1 F T ER0
AGAIN  AH0 G EH1 N
ALWAYS  AO1 L W EY2 Z
AND  AH0 N D
AND(1)  AE1 N D
ANOTHER  AH0 N AH1 DH ER0
ANSWER  AE1 N S ER0
APPLE  AE1 P AH0 L
AUTUMN  AO1 T AH0 M
AWAY  AH0 W EY1
BABY  B EY1 B IY0
BEAUTIFUL  B Y UW1 T AH0 F AH0 L
BECAUSE  B IH0 K AO1 Z
BEFORE  B IH0 F AO1 R
BETWEEN  B IH0 T W IY1 N
BIRD  B ER1 D
BLUE  B L UW1
BLUEBERRY  B L UW1 B EH2 R IY0
BREATHE  B R IY1 DH
BRIGHT  B R AY1 T
BROKEN  B R OW1 K AH0 N
BUTTER  B AH1 T ER0
BUTTERFLY  B AH1 T ER0 F L AY2
CANDLE  K AE1 N D AH0 L
CARRY  K AE1 R IY0
CAT  K AE1 T
CHANGE  CH EY1 N JH
CHILDREN  CH IH1 L D R AH0 N
CIRCLE  S ER1 K AH0 L
CITY  S IH1 T IY0
CLOSER  K L OW1 S ER0
COLOR  K AH1 L ER0
COMPUTER  K AH0 M P Y UW1 T ER0
DANCE  D AE1 N S
DARKNESS  D AA1 R K N AH0 S
DAUGHTER  D AO1 T ER0
DIAMOND  D AY1 M AH0 N D
DIFFERENT  D IH1 F R AH0 N T
DISTANCE  D IH1 S T AH0 N S
DREAM  D R IY1 M
EARLY  ER1 L IY0
EMPTY  EH1 M P T IY0
ENOUGH  IH0 N AH1 F
EVENING  IY1 V N IH0 NG
EVERY  EH1 V ER0 IY0
EXTRA  EH1 K S T R AH0
FAMILY  F AE1 M AH0 L IY0
FEATHER  F EH1 DH ER0
FINALLY  F AY1 N AH0 L IY0
FIRE  F AY1 ER0
FLOWER  F L AW1 ER0
FOREVER  F ER0 EH1 V ER0
FORGOTTEN  F ER0 G AA1 T AH0 N
FREEDOM  F R IY1 D AH0 M
GARDEN  G AA1 R D AH0 N
GENTLE  JH EH1 N T AH0 L
GOLDEN  G OW1 L D AH0 N
GOODBYE  G UH2 D B AY1
HALLELUJAH  HH AE2 L AH0 L UW1 Y AH0
HAPPINESS  HH AE1 P IY0 N AH0 S
HEART  HH AA1 R T
HEAVEN  HH EH1 V AH0 N
HELLO  HH AH0 L OW1
HMM  HH M
HOLLOW  HH AA1 L OW0
HORIZON  HH ER0 AY1 Z AH0 N
HUNDRED  HH AH1 N D R AH0 D
ISLAND  AY1 L AH0 N D
JOURNEY  JH ER1 N IY0
LANTERN  L AE1 N T ER0 N
LAUGHTER  L AE1 F T ER0
LIGHTNING  L AY1 T N IH0 NG
LISTEN  L IH1 S AH0 N
LITTLE  L IH1 T AH0 L
LONELY  L OW1 N L IY0
MEMORY  M EH1 M ER0 IY0
MIDNIGHT  M IH1 D N AY2 T
MIRROR  M IH1 R ER0
MOMENT  M OW1 M AH0 N T
MORNING  M AO1 R N IH0 NG
MOUNTAIN  M AW1 N T AH0 N
MUSIC  M Y UW1 Z IH0 K
NEVER  N EH1 V ER0
NOTHING  N AH1 TH IH0 NG
OCEAN  OW1 SH AH0 N
ORANGE  AO1 R AH0 N JH
OVER  OW1 V ER0
PANCAKES  P AE1 N K EY2 K S
PAPER  P EY1 P ER0
PEOPLE  P IY1 P AH0 L
PERFECT  P ER1 F IH0 K T
PERFECT(1)  P ER0 F EH1 K T
PICTURE  P IH1 K CH ER0
PROMISE  P R AA1 M AH0 S
QUESTION  K W EH1 S CH AH0 N
QUIET  K W AY1 AH0 T
RAINBOW  R EY1 N B OW2
READ  R EH1 D
READ(1)  R IY1 D
REASON  R IY1 Z AH0 N
REMEMBER  R IH0 M EH1 M B ER0
RIVER  R IH1 V ER0
SEASON  S IY1 Z AH0 N
SHADOW  SH AE1 D OW2
SHOULDER  SH OW1 L D ER0
SILENCE  S AY1 L AH0 N S
SILVER  S IH1 L V ER0
SOMETIMES  S AH1 M T AY2 M Z
STORY  S T AO1 R IY0
STRANGER  S T R EY1 N JH ER0
SUMMER  S AH1 M ER0
SUNSHINE  S AH1 N SH AY2 N
SYLLABLE  S IH1 L AH0 B AH0 L
TABLE  T EY1 B AH0 L
THUNDER  TH AH1 N D ER0
TOGETHER  T AH0 G EH1 DH ER0
TOMORROW  T AH0 M AA1 R OW2
TRAVEL  T R AE1 V AH0 L
UMBRELLA  AH0 M B R EH1 L AH0
UNDER  AH1 N D ER0
USE  Y UW1 S
USE(1)  Y UW1 Z
VILLAGE  V IH1 L AH0 JH
VOICE  V OY1 S
WATER  W AO1 T ER0
WHISPER  W IH1 S P ER0
WINDOW  W IH1 N D OW2
WINTER  W IH1 N T ER0
WONDER  W AH1 N D ER0
YELLOW  Y EH1 L OW2
YESTERDAY  Y EH1 S T ER0 D EY2
"""

VOWELS = "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
ONSETS = [
    "", "B", "CH", "D", "F", "G", "HH", "JH", "K", "L", "M", "N", "P", "R",
    "S", "SH", "T", "TH", "V", "W", "Y", "Z",
    "B L", "B R", "D R", "F L", "F R", "G L", "G R", "K L", "K R", "P L",
    "P R", "S K", "S L", "S M", "S N", "S P", "S T", "S W", "T R",
    "S T R", "S K R", "S P L",
]
CODAS = [
    "", "B", "CH", "D", "F", "G", "JH", "K", "L", "M", "N", "NG", "P", "R",
    "S", "SH", "T", "TH", "V", "Z",
    "K S", "K T", "L D", "L Z", "M P", "N D", "N T", "N Z", "R D", "R K",
    "R N", "S T", "T S", "N CH", "L T",
]
SPELL = {
    "AA": "O", "AE": "A", "AH": "U", "AO": "AW", "AW": "OW", "AY": "I",
    "EH": "E", "ER": "ER", "EY": "AY", "IH": "I", "IY": "EE", "OW": "O",
    "OY": "OY", "UH": "OO", "UW": "U",
    "B": "B", "CH": "CH", "D": "D", "DH": "TH", "F": "F", "G": "G",
    "HH": "H", "JH": "J", "K": "K", "L": "L", "M": "M", "N": "N",
    "NG": "NG", "P": "P", "R": "R", "S": "S", "SH": "SH", "T": "T",
    "TH": "TH", "V": "V", "W": "W", "Y": "Y", "Z": "Z", "ZH": "ZH",
}

TARGET_ENTRIES = 1000


def pseudo_word(rng: random.Random) -> list[str]:
    n_syllables = rng.choice([1, 2, 2, 3, 3, 4])
    stressed = rng.randrange(n_syllables)
    phonemes: list[str] = []
    for i in range(n_syllables):
        onset = rng.choice(ONSETS)
        if onset:
            phonemes.extend(onset.split())
        stress = "1" if i == stressed else rng.choice(["0", "0", "2"])
        phonemes.append(rng.choice(VOWELS) + stress)
        # codas mostly on the last syllable, keeping clusters word-internal
        if i == n_syllables - 1 or rng.random() < 0.25:
            coda = rng.choice(CODAS)
            if coda:
                phonemes.extend(coda.split())
    return phonemes


def spell(phonemes: list[str]) -> str:
    return "".join(SPELL[p.rstrip("012")] for p in phonemes)


def main() -> None:
    rng = random.Random(20240414)
    entries: dict[str, list[str]] = {}
    count = 0
    for line in CURATED.strip().splitlines():
        head, phonemes = line.split("  ", 1)
        word = head.split("(")[0]
        entries.setdefault(word, []).append(phonemes)
        count += 1
    while count < TARGET_ENTRIES:
        phonemes = pseudo_word(rng)
        word = spell(phonemes)
        variants = entries.setdefault(word, [])
        rendered = " ".join(phonemes)
        if rendered in variants or len(variants) >= 3:
            continue
        variants.append(rendered)
        count += 1

    lines = [
        ";;; CMUdict-format sample bundled for syllabification tests.",
        ";;; Curated common words plus generated pseudo-words; regenerate",
        ";;; with scripts/make_dict_sample.py.",
    ]
    for word in sorted(entries):
        for variant, phonemes in enumerate(entries[word]):
            head = word if variant == 0 else f"{word}({variant})"
            lines.append(f"{head}  {phonemes}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {count} entries ({len(entries)} headwords) to {OUT}")


if __name__ == "__main__":
    main()
