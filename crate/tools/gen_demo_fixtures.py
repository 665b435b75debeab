#!/usr/bin/env python3
"""Generate the bundled demo fixtures (corpus, vocabulary, embeddings).

Deterministic: re-running this script reproduces the checked-in files
byte-for-byte. The corpus is 40 alternating spam/ham documents built from
paired templates so that every non-class word occurs equally often in both
classes; the embeddings place spam words inside the span of their context
words and decoy words orthogonal to it, so context-sensitive correction can
tell real spam words from higher-frequency decoys.
"""

import collections
import random
import re
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "crates" / "core" / "data"
SEED = 20260818
DIM = 50
NOISE = 0.01
DECOY_FREQUENCY = 5000

SPAM_WORDS = ["money", "offer", "prize", "cash", "loan", "winner"]
HAM_WORDS = ["meeting", "notes", "review", "agenda", "report", "minutes"]
# One decoy per spam word, each at edit distance 1 from its partner.
DECOYS = ["honey", "offed", "price", "case", "lean", "winter"]
CONTEXT_PAIRS = [
    ("account", "transfer"),
    ("limited", "exclusive"),
    ("lucky", "draw"),
    ("instant", "bonus"),
    ("approved", "credit"),
    ("grand", "raffle"),
]

FRAMES = [
    "Your {c1} {c2} {a} is ready. Claim the {c3} {c4} {b} today.",
    "We confirm the {c1} {c2} {a} for you. Please check this {c3} {c4} {b} soon.",
    "Here is an update about the {c1} {c2} {a}. The {c3} {c4} {b} closes on Friday.",
    "Reminder about your {c1} {c2} {a}. Reply to secure the {c3} {c4} {b} now.",
    "Final notice for the {c1} {c2} {a}. See the attached {c3} {c4} {b} details.",
]


def build_corpus():
    docs = []
    for j in range(20):
        frame = FRAMES[j % 5]
        c1, c2 = CONTEXT_PAIRS[j % 6]
        c3, c4 = CONTEXT_PAIRS[(j + 3) % 6]
        slots = dict(c1=c1, c2=c2, c3=c3, c4=c4)
        spam_text = frame.format(a=SPAM_WORDS[j % 6], b=SPAM_WORDS[(j + 1) % 6], **slots)
        ham_text = frame.format(a=HAM_WORDS[j % 6], b=HAM_WORDS[(j + 1) % 6], **slots)
        docs.append(("spam", spam_text))
        docs.append(("ham", ham_text))
    return docs


def build_vocab(docs):
    counts = collections.Counter()
    for _, text in docs:
        counts.update(re.findall(r"[a-z']+", text.lower()))
    for decoy in DECOYS:
        counts[decoy] = DECOY_FREQUENCY
    return dict(sorted(counts.items()))


def build_embeddings(rng):
    def vec(*axes):
        v = [0.0] * DIM
        for axis in axes:
            v[axis] = 1.0
        return [x + rng.gauss(0.0, NOISE) for x in v]

    rows = []
    for first, second in CONTEXT_PAIRS:
        rows.append((first, vec(0)))
        rows.append((second, vec(1)))
    for word in SPAM_WORDS:
        rows.append((word, vec(0, 1)))
    for word in DECOYS:
        rows.append((word, vec(2, 3)))
    for word in HAM_WORDS:
        rows.append((word, vec(4, 5)))
    return rows


def main():
    rng = random.Random(SEED)
    docs = build_corpus()
    vocab = build_vocab(docs)
    rows = build_embeddings(rng)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    corpus = "".join(f"{label}\t{text}\n" for label, text in docs)
    (OUT_DIR / "demo_corpus.tsv").write_text(corpus, encoding="utf-8")

    vocab_tsv = "".join(f"{word}\t{count}\n" for word, count in vocab.items())
    (OUT_DIR / "demo_vocab.tsv").write_text(vocab_tsv, encoding="utf-8")

    lines = [f"{len(rows)} {DIM}"]
    for word, values in rows:
        lines.append(word + " " + " ".join(f"{x:.6f}" for x in values))
    (OUT_DIR / "demo_embeddings.vec").write_text("\n".join(lines) + "\n", encoding="utf-8")

    print(f"wrote {len(docs)} docs, {len(vocab)} vocab words, {len(rows)} embeddings")


if __name__ == "__main__":
    main()
