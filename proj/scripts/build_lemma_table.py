#!/usr/bin/env python3
"""Regenerate data/lemmas_en.tsv from the spaCy English lookup tables.

The table is a frequency-ranked subset of spacy-lookups-data's
en_lemma_lookup (MIT; WordNet-derived). Entries are closed so that every
lemma is a fixed point of the C++ lemmatizer (table lookup, then suffix
fallback). Usage:

    pip download spacy-lookups-data --no-deps -d /tmp/sl
    python3 scripts/build_lemma_table.py /tmp/sl/spacy_lookups_data-*.whl data/lemmas_en.tsv
"""
import gzip
import json
import re
import sys
import zipfile

TARGET_INFLECTIONS = 6000

# Lookup entries that collapse domain vocabulary onto unrelated lemmas.
EXCLUDE = {
    "data", "media", "better", "best", "less", "least", "as", "us", "news",
    "species", "series", "means", "politics", "economics", "physics",
    "lives", "rice", "worse", "worst", "more", "most", "left", "found",
    "saw", "felt", "lay", "bore", "ground", "wound", "dove", "rose",
    "belongings", "savings", "earnings", "proceedings", "outskirts",
}

WORD = re.compile(r"^[a-z][a-z'-]*[a-z]$")


def fallback(word, lemmas):
    n = len(word)
    if word.endswith("ies") and n - 3 >= 2:
        return word[:-3] + "y"
    if word.endswith("es") and n - 2 >= 3:
        if word[:-1] in lemmas:
            return word[:-1]
        return word[:-2]
    if word.endswith("s") and not word.endswith(("ss", "us", "is")) and n - 1 >= 3:
        return word[:-1]
    for suffix in ("ing", "ed"):
        if not word.endswith(suffix) or (suffix == "ed" and word.endswith("eed")):
            continue
        stem = word[: -len(suffix)]
        if len(stem) < 3:
            continue
        if stem + "e" in lemmas:
            return stem + "e"
        if len(stem) >= 4 and stem[-1] == stem[-2] and stem[:-1] in lemmas:
            return stem[:-1]
        return stem
    return word


def lemmatize(word, table, lemmas):
    if word in table:
        return table[word]
    return fallback(word, lemmas)


def main(wheel, out_path):
    z = zipfile.ZipFile(wheel)
    lookup = json.loads(gzip.decompress(z.read("spacy_lookups_data/data/en_lemma_lookup.json.gz")))
    prob = json.loads(gzip.decompress(z.read("spacy_lookups_data/data/en_lexeme_prob.json.gz")))

    candidates = [
        (word, lemma) for word, lemma in lookup.items()
        if word != lemma and word not in EXCLUDE
        and WORD.match(word) and WORD.match(lemma) and word in prob
    ]
    candidates.sort(key=lambda kv: (-prob[kv[0]], kv[0]))
    table = dict(candidates[:TARGET_INFLECTIONS])

    # Resolve chains so that every value is terminal.
    for word in list(table):
        seen = {word}
        lemma = table[word]
        while lemma in table and table[lemma] != lemma and lemma not in seen:
            seen.add(lemma)
            lemma = table[lemma]
        table[word] = lemma

    # Pin lemmas that the suffix fallback would otherwise rewrite.
    while True:
        lemmas = set(table.values())
        changed = False
        for lemma in sorted(lemmas):
            if lemmatize(lemma, table, lemmas) != lemma:
                table[lemma] = lemma
                changed = True
        if not changed:
            break

    lemmas = set(table.values())
    assert all(lemmatize(v, table, lemmas) == v for v in lemmas)
    assert table["diseases"] == "disease" and table["countries"] == "country"

    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        for word in sorted(table):
            f.write(f"{word}\t{table[word]}\n")
    inflections = sum(1 for k, v in table.items() if k != v)
    print(f"wrote {len(table)} entries ({inflections} inflections) to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
