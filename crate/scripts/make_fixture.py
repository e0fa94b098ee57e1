#!/usr/bin/env python3
"""Regenerate the bundled trilingual fixture (dataset TSV + embedding text file).

The cognate alignments below are hand-written German/Dutch/English triplets.
Embeddings are synthetic: every concept has a shared base vector, German and
Dutch share an extra component, and each language adds its own noise. The
Dutch "beukeboom" vector is deliberately left out so one set is incomplete.

Usage: python3 scripts/make_fixture.py crates/core/tests/fixtures
"""
import random
import sys
from pathlib import Path

# concept, (en form, en alignment), (de form, de alignment), (nl form, nl alignment)
SETS = [
    ("DRINK", ("drink", "d ʀ ɪ ŋ k - -"), ("trinken", "t ʀ ɪ ŋ k ə n"), ("drinken", "d r ɪ ŋ k ə -")),
    ("WATER", ("water", "w ɔː t ə -"), ("wasser", "v a s ɐ -"), ("water", "ʋ aː t ə r")),
    ("BRING", ("bring", "b ɹ ɪ ŋ - -"), ("bringen", "b ʁ ɪ ŋ ə n"), ("brengen", "b r ɛ ŋ ə -")),
    ("SING", ("sing", "s ɪ ŋ - -"), ("singen", "z ɪ ŋ ə n"), ("zingen", "z ɪ ŋ ə -")),
    ("COME", ("come", "k ʌ m - -"), ("kommen", "k ɔ m ə n"), ("komen", "k oː m ə -")),
    ("SWIM", ("swim", "s w ɪ m - -"), ("schwimmen", "ʃ v ɪ m ə n"), ("zwemmen", "z ʋ ɛ m ə -")),
    ("HAND", ("hand", "h æ n d"), ("hand", "h a n t"), ("hand", "h ɑ n t")),
    ("HOUSE", ("house", "h aʊ s"), ("haus", "h aʊ s"), ("huis", "h œy s")),
    ("MOUSE", ("mouse", "m aʊ s"), ("maus", "m aʊ s"), ("muis", "m œy s")),
    ("FISH", ("fish", "f ɪ ʃ"), ("fisch", "f ɪ ʃ"), ("vis", "v ɪ s")),
    ("BREAD", ("bread", "b ɹ ɛ d"), ("brot", "b ʁ oː t"), ("brood", "b r oː t")),
    ("GREEN", ("green", "ɡ ɹ iː n"), ("grün", "ɡ ʁ yː n"), ("groen", "ɣ r u n")),
    ("NAME", ("name", "n eɪ m -"), ("name", "n aː m ə"), ("naam", "n aː m -")),
    ("FATHER", ("father", "f ɑː ð ə -"), ("vater", "f aː t ɐ -"), ("vader", "v aː d ə r")),
    ("MOTHER", ("mother", "m ʌ ð ə -"), ("mutter", "m ʊ t ɐ -"), ("moeder", "m u d ə r")),
    ("BROTHER", ("brother", "b ɹ ʌ ð ə -"), ("bruder", "b ʁ uː d ɐ -"), ("broer", "b r u - - r")),
    ("SLEEP", ("sleep", "s l iː p - -"), ("schlafen", "ʃ l aː f ə n"), ("slapen", "s l aː p ə -")),
    ("EAT", ("eat", "iː t - -"), ("essen", "ɛ s ə n"), ("eten", "eː t ə -")),
    ("GIVE", ("give", "ɡ ɪ v - -"), ("geben", "ɡ eː b ə n"), ("geven", "ɣ eː v ə -")),
    ("HEAR", ("hear", "h ɪ ɹ - -"), ("hören", "h øː ʁ ə n"), ("horen", "h oː r ə -")),
    ("HELP", ("help", "h ɛ l p - -"), ("helfen", "h ɛ l f ə n"), ("helpen", "h ɛ l p ə -")),
    ("HEART", ("heart", "h ɑː - t"), ("herz", "h ɛ ʁ ts"), ("hart", "h ɑ r t")),
    ("BLOOD", ("blood", "b l ʌ d"), ("blut", "b l uː t"), ("bloed", "b l u t")),
    ("FOOT", ("foot", "f ʊ t"), ("fuß", "f uː s"), ("voet", "v u t")),
    ("APPLE", ("apple", "æ p ə l"), ("apfel", "a pf ə l"), ("appel", "ɑ p ə l")),
    ("SHIP", ("ship", "ʃ - ɪ p"), ("schiff", "ʃ - ɪ f"), ("schip", "s x ɪ p")),
    ("TOOTH", ("tooth", "t uː - θ"), ("zahn", "ts aː n -"), ("tand", "t ɑ n t")),
    ("SALT", ("salt", "s ɔː l t"), ("salz", "z a l ts"), ("zout", "z ɑu - t")),
    ("COLD", ("cold", "k əʊ l d"), ("kalt", "k a l t"), ("koud", "k ɑu - t")),
    ("WINTER", ("winter", "w ɪ n t ə -"), ("winter", "v ɪ n t ɐ -"), ("winter", "ʋ ɪ n t ə r")),
    ("BEECH", ("beech", "b iː tʃ - - - -"), ("buche", "b uː x ə - - -"), ("beukeboom", "b øː k ə b oː m")),
]

LANGS = ["de", "nl", "en"]
DIM = 48
MISSING = {("nl", "beukeboom")}


def main(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = ["ID\tLANGUAGE\tCONCEPT\tFORM\tLOOKUP\tTOKENS\tALIGNMENT\tCOGSET"]
    for i, (concept, en, de, nl) in enumerate(SETS, start=1):
        forms = {"en": en, "de": de, "nl": nl}
        widths = {len(a.split()) for _, a in forms.values()}
        assert len(widths) == 1, concept
        for lang in LANGS:
            form, alignment = forms[lang]
            tokens = " ".join(c for c in alignment.split() if c != "-")
            rows.append(f"{lang}-{i}\t{lang}\t{concept}\t{form}\t\t{tokens}\t{alignment}\t{i}")
    (out_dir / "trilingual.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    rng = random.Random(20240207)
    lines = []
    for concept, en, de, nl in SETS:
        base = [rng.gauss(0, 1) for _ in range(DIM)]
        shared = [rng.gauss(0, 1) for _ in range(DIM)]
        # per-concept spread so the cosine distributions are not degenerate
        drift = rng.uniform(0.2, 0.5)
        for lang, (form, _) in (("de", de), ("nl", nl), ("en", en)):
            if (lang, form) in MISSING:
                continue
            if lang == "en":
                vec = [b + (drift + 0.1) * rng.gauss(0, 1) for b in base]
            else:
                vec = [b + 0.35 * s + drift * rng.gauss(0, 1) for b, s in zip(base, shared)]
            key = f"/c/{lang}/{form}" if lang != "nl" else f"{lang}/{form}"
            lines.append(key + " " + " ".join(f"{x:.4f}" for x in vec))
    # distractors in other languages and an unrelated English word
    for key in ("/c/fr/boire", "/c/sv/dricka", "/c/en/unrelated"):
        lines.append(key + " " + " ".join(f"{rng.gauss(0, 1):.4f}" for _ in range(DIM)))
    rng.shuffle(lines)
    header = f"{len(lines)} {DIM}"
    (out_dir / "embeddings.txt").write_text(header + "\n" + "\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures"))
