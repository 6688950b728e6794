#!/usr/bin/env python3
"""Regenerates tests/fixtures/audit/corpus.jsonl.

The corpus is synthetic: two years of short news-like documents plus a few
public-domain paragraphs. Word choices are skewed on purpose (more male
pronouns, "husband and wife" before "wife and husband", "mankind" over
"humanity") so the end-to-end audit has known directions.
"""
import json
import random
import sys
from pathlib import Path

THINGS = ["report", "plan", "car", "garden", "letter", "house", "budget", "speech", "book", "team"]
PLACES = ["station", "market", "church", "office", "school", "hospital", "court", "harbour"]
OCCUPATIONS = ["nurse", "doctor", "lawyer", "teacher", "pilot", "engineer", "soldier", "writer"]
EMOTIONS = ["afraid", "angry", "happy", "sad", "joyful", "anxious", "proud", "lonely", "calm", "upset"]
ACTIONS = ["build", "fight", "lead", "run", "win", "drive", "carry", "defend", "climb", "push"]
FAMILY = ["mother", "father", "aunt", "uncle", "cousin", "grandmother", "child", "baby"]

GUTENBERG = [
    ("It is a truth universally acknowledged, that a single man in possession of a good fortune, "
     "must be in want of a wife. However little known the feelings or views of such a man may be "
     "on his first entering a neighbourhood, this truth is so well fixed in the minds of the "
     "surrounding families, that he is considered the rightful property of some one or other of "
     "their daughters."),
    ("Mr. Bennet was so odd a mixture of quick parts, sarcastic humour, reserve, and caprice, that "
     "the experience of three and twenty years had been insufficient to make his wife understand "
     "his character. Her mind was less difficult to develop. She was a woman of mean understanding, "
     "little information, and uncertain temper."),
]


def sentence(rng):
    r = rng.random()
    cap = lambda s: s[0].upper() + s[1:]
    if r < 0.22:
        return f"He said that his {rng.choice(THINGS)} was ready and he would {rng.choice(ACTIONS)} it."
    if r < 0.30:
        return f"She said the {rng.choice(THINGS)} was late."
    if r < 0.36:
        return f"The husband and wife arrived at the {rng.choice(PLACES)} together."
    if r < 0.38:
        return f"The wife and husband left the {rng.choice(PLACES)} early."
    if r < 0.42:
        return f"His son and daughter visited their {rng.choice(FAMILY)}."
    if r < 0.44:
        return "The boy and girl ran to the gate."
    if r < 0.48:
        return f"The history of mankind is written in every {rng.choice(THINGS)}."
    if r < 0.49:
        return "The story of humanity is long."
    if r < 0.55:
        return f"The female {rng.choice(OCCUPATIONS)} spoke to him at the {rng.choice(PLACES)}."
    if r < 0.58:
        return f"A male {rng.choice(OCCUPATIONS)} waited outside."
    if r < 0.70:
        a, b = rng.sample(EMOTIONS, 2)
        return f"The women felt {a} and {b} after the {rng.choice(THINGS)}."
    if r < 0.82:
        a, b = rng.sample(ACTIONS, 2)
        return f"The men {a} and {b} near the {rng.choice(PLACES)}."
    if r < 0.86:
        return f"Men and women gathered at the {rng.choice(PLACES)}."
    if r < 0.90:
        return f"The chairman opened the {rng.choice(THINGS)} meeting."
    if r < 0.95:
        return cap(f"{rng.choice(FAMILY)} and {rng.choice(FAMILY)} shared the {rng.choice(THINGS)}.")
    return f"Everyone agreed the {rng.choice(THINGS)} was {rng.choice(EMOTIONS)}."


def main(out_path):
    rng = random.Random(20100101)
    docs = []
    for year in (2009, 2010):
        for i in range(45):
            text = " ".join(sentence(rng) for _ in range(rng.randint(4, 7)))
            month = 1 + i % 12
            day = 1 + i % 28
            docs.append({"id": f"news-{year}-{i:03d}", "text": text, "date": f"{year}-{month:02d}-{day:02d}",
                         "source": "synthetic"})
    for i, para in enumerate(GUTENBERG):
        docs.append({"id": f"gutenberg-{i}", "text": para, "date": f"{2009 + i}-06-01", "source": "gutenberg"})
    with open(out_path, "w", encoding="utf-8", newline="\n") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).resolve().parent.parent / "tests/fixtures/audit/corpus.jsonl"))
