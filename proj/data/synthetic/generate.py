#!/usr/bin/env python3
"""Regenerates the bundled synthetic dataset in place.

The three languages are word-for-word relatable: every vocabulary stem has a
source, pivot, and target surface form, and a slice of the vocabulary is
shared between source and target so copy-through scoring lands above zero.
Run from this directory: python3 generate.py
"""

import random

SEED = 20240817

NOUNS = [
    "balsa", "curnel", "dolina", "fenek", "gorma", "helva", "linera", "morin",
    "nevola", "ozana", "pirun", "quela", "revka", "silona", "turbel", "umena",
    "vralo", "wexim", "yolda", "zanki", "arcova", "brumela", "cielma", "dovra",
]
VERBS = ["ketra", "losena", "mirta", "novela", "porisa", "rekona", "sovela", "tumera"]
ADJS = ["erma", "fiora", "grava", "ilesa", "jemol", "kalva", "lumet", "manok"]
DETS = ["la", "de", "un", "che"]
PREPS = ["tl", "permez", "sura"]
OOV = ["xenoprak", "kriptoval", "zumerlat", "febrovin", "quistrem"]

SHARED_WITH_TARGET = set(NOUNS[::3] + VERBS[::3] + ADJS[::3] + DETS + ["permez"])


def pivot_form(word):
    if word in DETS:
        return {"la": "il", "de": "di", "un": "uno", "che": "che"}[word]
    if word in PREPS:
        return {"tl": "nel", "permez": "tramite", "sura": "sopra"}[word]
    return word[:-1] + "o" if word[-1] in "aeiou" else word + "o"


def target_form(word):
    if word in SHARED_WITH_TARGET or word in OOV or not word[0].isalpha():
        return word
    if word in PREPS:
        return {"tl": "tel", "sura": "sore"}.get(word, word)
    return word[:-1] + "e" if word[-1] in "aeiou" else word + "e"


def noun_phrase(rng):
    words = []
    if rng.random() < 0.8:
        words.append(rng.choice(DETS))
    words.append(rng.choice(NOUNS))
    if rng.random() < 0.45:
        words.append(rng.choice(ADJS))
    return words


def sentence_words(rng):
    words = noun_phrase(rng)
    words.append(rng.choice(VERBS))
    words += noun_phrase(rng)
    if rng.random() < 0.4:
        words.append(rng.choice(PREPS))
        words += noun_phrase(rng)
    if rng.random() < 0.1:
        words.append(str(rng.randrange(1900, 2000)))
    return words


def render(words, form):
    return " ".join(form(w) for w in words) + " ."


def main():
    rng = random.Random(SEED)
    pool = [sentence_words(rng) for _ in range(420)]

    direct = pool[:140]
    test = pool[140:160]
    sp_only = pool[160:250]      # source–pivot training sentences
    shared_pivot = pool[250:310]  # pivot sentences present in both pivot corpora
    pt_only = pool[310:340]

    # A third of the test sentences get out-of-vocabulary words so coverage
    # varies from sentence to sentence.
    for i, words in enumerate(test):
        if i % 3 == 0:
            slot = rng.randrange(len(words))
            words[slot] = rng.choice(OOV)

    identity = lambda w: w

    with open("train.direct.tsv", "w", encoding="utf-8") as f:
        for words in direct:
            f.write(render(words, identity) + "\t" + render(words, target_form) + "\n")

    with open("train.source_pivot.tsv", "w", encoding="utf-8") as f:
        for words in sp_only + shared_pivot:
            f.write(render(words, identity) + "\t" + render(words, pivot_form) + "\n")

    with open("train.pivot_target.tsv", "w", encoding="utf-8") as f:
        for words in shared_pivot + pt_only:
            f.write(render(words, pivot_form) + "\t" + render(words, target_form) + "\n")

    with open("test.src.txt", "w", encoding="utf-8") as f:
        for words in test:
            f.write(render(words, identity) + "\n")

    with open("test.ref.txt", "w", encoding="utf-8") as f:
        for words in test:
            f.write(render(words, target_form) + "\n")


if __name__ == "__main__":
    main()
