#!/usr/bin/env python3
"""Regenerate the bundled word lists under crates/core/resources/.

Requires `wordfreq` and `lemminflect` (pip install wordfreq lemminflect).
Outputs are deterministic for a given pair of package versions.

  pos_lexicon.tsv     word <TAB> comma-separated coarse categories, most likely first
  unigram_counts.tsv  word <TAB> count (frequency per billion tokens)
  irregulars.tsv      lemma <TAB> form <TAB> surface
"""
import csv
import gzip
import os
import re
import sys

import lemminflect
import wordfreq

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "resources")
ALPHA = re.compile(r"^[a-z]+$")
VOWELS = set("aeiou")

# Closed-class words never count as content words for routing.
FUNCTION_WORDS = set("""
a an the this that these those my your his her its our their some any every each no
i me we us you he him she it they them who whom whose which what whatever whoever
and or but nor so yet for of in on at by with from to into onto upon about above below
over under between among through during before after since until than as if because
while although though unless whether not be am is are was were been being have has had
having do does did done will would shall should can could may might must
there here where when why how all both either neither one none other another such
""".split())


def syllables(w):
    return len(re.findall(r"[aeiouy]+", w))


def is_cvc(w):
    if len(w) < 3 or syllables(w) != 1:
        return False
    a, b, c = w[-3], w[-2], w[-1]
    return a not in VOWELS and b in VOWELS and c not in VOWELS and c not in "wxy"


def cons_y(w):
    return len(w) >= 2 and w[-1] == "y" and w[-2] not in VOWELS


def sibilant(w):
    return w.endswith(("s", "x", "z", "ch", "sh"))


def regular(lemma, form):
    w = lemma
    if form in ("BASE", "SINGULAR", "POSITIVE"):
        return w
    if form == "THIRD_SG":
        if sibilant(w) or w.endswith("o"):
            return w + "es"
        return w[:-1] + "ies" if cons_y(w) else w + "s"
    if form == "PLURAL":
        if sibilant(w):
            return w + "es"
        return w[:-1] + "ies" if cons_y(w) else w + "s"
    if form == "GERUND":
        if w.endswith("ie"):
            return w[:-2] + "ying"
        if w.endswith(("ee", "ye", "oe")):
            return w + "ing"
        if w.endswith("e") and len(w) > 2:
            return w[:-1] + "ing"
        return w + w[-1] + "ing" if is_cvc(w) else w + "ing"
    if form in ("PAST", "PAST_PART"):
        if w.endswith("e"):
            return w + "d"
        if cons_y(w):
            return w[:-1] + "ied"
        return w + w[-1] + "ed" if is_cvc(w) else w + "ed"
    if form in ("COMPARATIVE", "SUPERLATIVE"):
        suffix = "er" if form == "COMPARATIVE" else "est"
        if syllables(w) >= 3:
            return ("more " if form == "COMPARATIVE" else "most ") + w
        if w.endswith("e"):
            return w + suffix[1:]
        if cons_y(w):
            return w[:-1] + "i" + suffix
        return w + w[-1] + suffix if is_cvc(w) else w + suffix
    raise ValueError(form)


def load_lemma_lu():
    path = os.path.join(os.path.dirname(lemminflect.__file__), "resources", "lemma_lu.csv.gz")
    table = {}
    with gzip.open(path, "rt", encoding="utf-8") as fh:
        for word, upos, lemmas in csv.reader(fh):
            table.setdefault(word, {})[upos] = lemmas.split("/")
    return table


def freq(w):
    return wordfreq.word_frequency(w, "en")


def order_categories(word, entry):
    cats = []
    if "noun" in entry:
        cats.append("NOUN")
    if "verb" in entry:
        cats.append("VERB")
    if "adj" in entry:
        cats.append("ADJ")
    if len(cats) < 2:
        return cats
    f = freq(word) or 1e-9
    verb_first = False
    if "VERB" in cats:
        lemma = entry["verb"][0]
        if lemma != word and word.endswith(("ed", "ing")):
            verb_first = True
        else:
            past = lemminflect.getInflection(lemma, tag="VBD")
            past = past[0] if past else regular(lemma, "PAST")
            if past != word and freq(past) > 0.3 * f:
                verb_first = True
    adj_first = False
    if "ADJ" in cats:
        adverb = word[:-1] + "ily" if cons_y(word) else word + "ly"
        if freq(adverb) > 0.02 * f:
            adj_first = True
    head = "VERB" if verb_first else ("ADJ" if adj_first else cats[0])
    return [head] + [c for c in cats if c != head]


def write_pos_lexicon(lemma_lu):
    rows = []
    for word in wordfreq.top_n_list("en", 200000):
        if not ALPHA.match(word) or word in FUNCTION_WORDS:
            continue
        entry = lemma_lu.get(word)
        if not entry:
            continue
        cats = order_categories(word, entry)
        if cats:
            rows.append((word, ",".join(cats)))
        if len(rows) >= 50000:
            break
    rows.sort()
    with open(os.path.join(OUT, "pos_lexicon.tsv"), "w", encoding="utf-8") as fh:
        for word, cats in rows:
            fh.write(f"{word}\t{cats}\n")
    return dict(rows)


def write_unigrams():
    rows = []
    for word in wordfreq.top_n_list("en", 40000):
        if not ALPHA.match(word):
            continue
        count = round(freq(word) * 1e9)
        if count > 0:
            rows.append((word, count))
        if len(rows) >= 20000:
            break
    with open(os.path.join(OUT, "unigram_counts.tsv"), "w", encoding="utf-8") as fh:
        for word, count in rows:
            fh.write(f"{word}\t{count}\n")


TAGS = {
    "VERB": [("THIRD_SG", "VBZ"), ("PAST", "VBD"), ("GERUND", "VBG"), ("PAST_PART", "VBN")],
    "NOUN": [("PLURAL", "NNS")],
    "ADJ": [("COMPARATIVE", "JJR"), ("SUPERLATIVE", "JJS")],
}
BUDGET = {"VERB": 420, "NOUN": 110, "ADJ": 90}


def write_irregulars(lemma_lu, pos_lex):
    # candidate lemmas per category in frequency order
    rows = []
    for cat, upos in (("VERB", "verb"), ("NOUN", "noun"), ("ADJ", "adj")):
        lemmas = []
        for word in wordfreq.top_n_list("en", 80000):
            if not ALPHA.match(word) or word in FUNCTION_WORDS:
                continue
            entry = lemma_lu.get(word, {})
            if upos in entry and word in entry[upos]:
                lemmas.append(word)
        # surfaces already produced regularly by a more frequent lemma
        regular_owner = {}
        for lemma in lemmas[:20000]:
            for form, _ in TAGS[cat]:
                regular_owner.setdefault(regular(lemma, form), lemma)
        out = []
        for lemma in lemmas:
            for form, tag in TAGS[cat]:
                got = lemminflect.getInflection(lemma, tag=tag, inflect_oov=False)
                if not got:
                    continue
                surface = got[0].lower()
                if not re.match(r"^[a-z]+( [a-z]+)?$", surface):
                    continue
                if form == "GERUND" and (not surface.endswith("ing") or surface == lemma):
                    continue
                if form == "THIRD_SG" and not surface.endswith("s"):
                    continue
                if cat == "NOUN" and (surface == lemma or not pos_lex.get(lemma, "").startswith("NOUN")):
                    continue
                owner = regular_owner.get(surface)
                if owner is not None and owner != lemma:
                    continue
                reg = regular(lemma, form)
                if surface == reg:
                    continue
                # spelling variants: keep whichever form is attested more often
                if " " not in surface and freq(surface) == 0:
                    continue
                if " " not in reg and freq(reg) >= freq(surface):
                    continue
                out.append((lemma, form, surface))
            if len(out) >= BUDGET[cat]:
                break
        rows.extend(out)
    # be: not covered above because it is a function word
    rows.extend([
        ("be", "THIRD_SG", "is"), ("be", "PAST", "was"), ("be", "GERUND", "being"),
        ("be", "PAST_PART", "been"), ("have", "THIRD_SG", "has"), ("have", "PAST", "had"),
        ("have", "PAST_PART", "had"), ("do", "THIRD_SG", "does"), ("do", "PAST", "did"),
        ("do", "PAST_PART", "done"),
    ])
    seen = set()
    with open(os.path.join(OUT, "irregulars.tsv"), "w", encoding="utf-8") as fh:
        for lemma, form, surface in rows:
            if (lemma, form) in seen:
                continue
            seen.add((lemma, form))
            fh.write(f"{lemma}\t{form}\t{surface}\n")
    return len(seen)


def main():
    lemma_lu = load_lemma_lu()
    pos_lex = write_pos_lexicon(lemma_lu)
    write_unigrams()
    n = write_irregulars(lemma_lu, pos_lex)
    print(f"pos entries={len(pos_lex)} irregulars={n}", file=sys.stderr)


if __name__ == "__main__":
    main()
