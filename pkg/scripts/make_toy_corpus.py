#!/usr/bin/env python3
"""Regenerate the bundled toy corpus and its word-similarity set.

The corpus is produced by a small seeded grammar whose word classes
(numbers, months, animals, foods, ...) share contexts, so embeddings trained
on it have a known semantic structure.  Uses only ``random.Random`` so the
output is identical across platforms and Python versions.

    python scripts/make_toy_corpus.py src/rosgns/data
"""

import argparse
import itertools
import os
import random

SEED = 20170417
N_TOKENS = 100_000

CLASSES = {
    "number": "one two three four five six seven eight nine ten".split(),
    "color": "red blue green yellow black white brown grey".split(),
    "pet": "dog cat rabbit parrot".split(),
    "farm": "horse cow sheep goat pig chicken".split(),
    "wild": "fox wolf bear deer lion tiger".split(),
    "fruit": "apple pear plum grape cherry banana lemon".split(),
    "meal": "bread cheese soup rice meat fish cake".split(),
    "drink": "water milk tea coffee wine beer juice".split(),
    "family": "mother father sister brother son daughter uncle aunt".split(),
    "job": "doctor teacher farmer soldier lawyer baker sailor priest".split(),
    "tool": "hammer knife saw axe spade rope".split(),
    "weekday": "monday tuesday wednesday thursday friday saturday sunday".split(),
    "month": ("january february march april may june july august "
              "september october november december").split(),
    "body": "hand head foot arm leg eye".split(),
    "vehicle": "car bus train ship boat bicycle cart".split(),
    "building": "house school church castle shop mill barn".split(),
}
CITIES = {
    "paris": "france", "lyon": "france", "berlin": "germany", "munich": "germany",
    "madrid": "spain", "seville": "spain", "rome": "italy", "milan": "italy",
    "tokyo": "japan", "osaka": "japan", "delhi": "india", "mumbai": "india",
    "toronto": "canada", "montreal": "canada",
}
CLASSES["city"] = list(CITIES)
CLASSES["country"] = sorted(set(CITIES.values()))

GROUPS = {
    "animal": ["pet", "farm", "wild"],
    "food": ["fruit", "meal", "drink"],
    "time": ["weekday", "month"],
    "place": ["city", "country"],
}
HABITAT = {"pet": "house", "farm": "field", "wild": "forest"}
ANIMAL_VERB = {
    "pet": ["slept", "played", "waited"],
    "farm": ["grazed", "ate", "stood"],
    "wild": ["hunted", "ran", "hid"],
}


class Grammar:
    def __init__(self, rng):
        self.rng = rng
        # skewed but bounded frequencies inside each class
        self.weights = {c: [1.0 / (i + 1) ** 0.6 for i in range(len(ws))] for c, ws in CLASSES.items()}

    def w(self, cls):
        return self.rng.choices(CLASSES[cls], weights=self.weights[cls])[0]

    def pick(self, options):
        return self.rng.choice(options)

    def animal(self):
        sub = self.pick(["pet", "farm", "wild"])
        return sub, self.w(sub)

    def food(self):
        return self.w(self.pick(["fruit", "meal"]))

    def sentence(self):
        r = self.rng.randrange(12)
        if r == 0:
            sub, a = self.animal()
            return f"the {self.w('job')} saw {self.w('number')} {a} near the {self.w('building')}"
        if r == 1:
            return (f"my {self.w('family')} {self.pick(['ate', 'cooked', 'bought'])} the {self.food()} "
                    f"and {self.pick(['drank', 'poured'])} some {self.w('drink')}")
        if r == 2:
            return (f"{self.pick(['he', 'she', 'they', 'we'])} {self.pick(['travelled', 'went', 'moved'])} "
                    f"from {self.w('city')} to {self.w('city')} by {self.w('vehicle')} in {self.w('month')}")
        if r == 3:
            city = self.w("city")
            return f"{city} is a {self.pick(['large', 'old', 'busy'])} city in {CITIES[city]}"
        if r == 4:
            return (f"on {self.w('weekday')} the {self.w('job')} {self.pick(['used', 'took', 'sharpened'])} "
                    f"a {self.w('tool')} to {self.pick(['fix', 'build', 'paint'])} the {self.w('building')}")
        if r == 5:
            sub, a = self.animal()
            return (f"the {self.w('color')} {a} {self.pick(ANIMAL_VERB[sub])} in the {HABITAT[sub]} "
                    f"with {self.w('number')} other {self.w(sub)}")
        if r == 6:
            return (f"she counted {self.w('number')} {self.w('fruit')} and {self.w('number')} "
                    f"{self.w('fruit')} on the table")
        if r == 7:
            return (f"the {self.w('job')} hurt {self.pick(['his', 'her'])} {self.w('body')} "
                    f"with the {self.w('tool')} on {self.w('weekday')}")
        if r == 8:
            return (f"my {self.w('family')} and my {self.w('family')} live in {self.w('country')} "
                    f"since {self.w('month')}")
        if r == 9:
            return (f"in {self.w('month')} and {self.w('month')} the {self.w('job')} sold "
                    f"{self.w('color')} {self.w('fruit')} at the {self.w('building')}")
        if r == 10:
            return (f"the {self.w('vehicle')} from {self.w('country')} arrived on {self.w('weekday')} "
                    f"with {self.w('number')} {self.w('job')}")
        sub, a = self.animal()
        return (f"a {self.w('family')} fed the {a} {self.w('meal')} and {self.w('drink')} "
                f"every {self.w('weekday')}")


def corpus_lines(seed=SEED, n_tokens=N_TOKENS):
    g = Grammar(random.Random(seed))
    total = 0
    lines = []
    while total < n_tokens:
        s = g.sentence()
        total += len(s.split())
        lines.append(s.capitalize() + ".")
    return lines


def word_class(word):
    for cls, words in CLASSES.items():
        if word in words:
            return cls
    return None


def group_of(cls):
    for group, members in GROUPS.items():
        if cls in members:
            return group
    return cls


def similarity_pairs(seed=SEED, n_pairs=300):
    """Graded pairs: same class 9, city/country match 8, same group 6, otherwise 1."""
    rng = random.Random(seed + 1)
    words = sorted(itertools.chain.from_iterable(CLASSES.values()))
    chosen = set()
    pairs = []

    def add(a, b):
        key = frozenset((a, b))
        if a == b or key in chosen:
            return
        chosen.add(key)
        ca, cb = word_class(a), word_class(b)
        if ca == cb:
            score = 9.0
        elif CITIES.get(a) == b or CITIES.get(b) == a:
            score = 8.0
        elif group_of(ca) == group_of(cb):
            score = 6.0
        else:
            score = 1.0
        pairs.append((a, b, score))

    while len(pairs) < n_pairs * 0.4:
        cls = rng.choice(sorted(CLASSES))
        add(*rng.sample(CLASSES[cls], 2))
    while len(pairs) < n_pairs * 0.55:
        group = rng.choice(sorted(GROUPS))
        c1, c2 = rng.sample(GROUPS[group], 2)
        add(rng.choice(CLASSES[c1]), rng.choice(CLASSES[c2]))
    while len(pairs) < n_pairs:
        add(*rng.sample(words, 2))
    # out-of-vocabulary rows exercise the OOV accounting
    pairs += [("zebra", "horse", 8.0), ("violin", "knife", 1.0)]
    return pairs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    args = ap.parse_args(argv)
    os.makedirs(args.outdir, exist_ok=True)
    with open(os.path.join(args.outdir, "toy_corpus.txt"), "w", newline="\n") as fh:
        fh.write("\n".join(corpus_lines()) + "\n")
    with open(os.path.join(args.outdir, "toy_similarity.tsv"), "w", newline="\n") as fh:
        fh.write("word1\tword2\tscore\n")
        for a, b, s in similarity_pairs():
            fh.write(f"{a}\t{b}\t{s:.1f}\n")


if __name__ == "__main__":
    main()
