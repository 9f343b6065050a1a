"""Fetch and normalise the large-scale corpus and word-similarity files.

Nothing produced here is vendored; the optional network test suite reads the
results from ``$ROSGNS_DATA_DIR``.

    python scripts/prepare_benchmarks.py corpus DATA_DIR
    python scripts/prepare_benchmarks.py dataset RAW_FILE DATA_DIR/ws-full.txt --format wordsim

``corpus`` downloads enwik9 (about 300 MB zipped) and writes ``enwik9.txt``
through a Python port of the classic ``wikifil.pl`` filter: article text
only, markup removed, digits spelled out, lowercase letters and single spaces.

``dataset`` converts a similarity file as distributed by its publishers into
the ``word1 word2 score`` lines read by ``rosgns evaluate``.  Obtain the raw
files yourself (wordsim-353 combined and its similarity/relatedness split,
simlex-999, MEN); their hosting changes too often to hard-code.
"""

import argparse
import os
import re
import sys
import urllib.request
import zipfile

ENWIK9_URL = "http://mattmahoney.net/dc/enwik9.zip"

_DIGITS = {str(i): f" {w} " for i, w in enumerate("zero one two three four five six seven eight nine".split())}
_SUBS = [
    (re.compile(r"<ref[^<]*</ref>"), ""),
    (re.compile(r"<[^>]*>"), ""),
    (re.compile(r"\[http:[^] ]*"), "["),
    (re.compile(r"\|thumb", re.I), ""),
    (re.compile(r"\|left", re.I), ""),
    (re.compile(r"\|right", re.I), ""),
    (re.compile(r"\|\d+px", re.I), ""),
    (re.compile(r"\[\[image:[^\[\]]*\|", re.I), ""),
    (re.compile(r"\[\[category:([^|\]]*)[^]]*\]\]", re.I), r"[[\1]]"),
    (re.compile(r"\[\[[a-z\-]*:[^\]]*\]\]"), ""),
    (re.compile(r"\[\[[^|\]]*\|"), "[["),
    (re.compile(r"\{\{[^}]*\}\}"), ""),
    (re.compile(r"\{[^}]*\}"), ""),
    (re.compile(r"\["), ""),
    (re.compile(r"\]"), ""),
    (re.compile(r"&[^;]*;"), " "),
]
_NON_LETTER = re.compile(r"[^a-z]+")


def _unescape(line):
    for ent, ch in (("&amp;", "&"), ("&lt;", "<"), ("&gt;", ">")):
        line = line.replace(ent, ch)
    return line


def filter_wiki(lines):
    """Yield cleaned article text, one chunk per input line."""
    in_text = False
    for line in lines:
        if "<text " in line:
            in_text = True
        if "#redirect" in line.lower():
            in_text = False
        if in_text:
            if "</text>" in line:
                in_text = False
            text = _unescape(line)
            for pattern, repl in _SUBS:
                text = pattern.sub(repl, text)
            text = text.lower()
            for digit, word in _DIGITS.items():
                text = text.replace(digit, word)
            text = _NON_LETTER.sub(" ", text).strip()
            if text:
                yield text


def cmd_corpus(args):
    os.makedirs(args.data_dir, exist_ok=True)
    archive = os.path.join(args.data_dir, "enwik9.zip")
    if not os.path.exists(archive):
        print(f"downloading {ENWIK9_URL}", file=sys.stderr)
        urllib.request.urlretrieve(ENWIK9_URL, archive)
    out = os.path.join(args.data_dir, "enwik9.txt")
    with zipfile.ZipFile(archive) as zf, zf.open("enwik9") as raw, open(out, "w", encoding="utf-8") as fh:
        lines = (b.decode("utf-8", errors="replace") for b in raw)
        for chunk in filter_wiki(lines):
            fh.write(chunk)
            fh.write(" ")
    print(out)


# (word1 column, word2 column, score column, strip "-pos" suffixes)
_FORMATS = {
    "wordsim": (0, 1, 2, False),
    "simlex": (0, 1, 3, False),
    "men": (0, 1, 2, True),
}


def normalise(lines, fmt):
    w1, w2, sc, strip_pos = _FORMATS[fmt]
    for line in lines:
        parts = re.split(r"[,\t ]+", line.strip())
        if len(parts) <= max(w1, w2, sc):
            continue
        try:
            score = float(parts[sc])
        except ValueError:
            continue  # header
        a, b = parts[w1].lower(), parts[w2].lower()
        if strip_pos:
            a, b = a.rsplit("-", 1)[0], b.rsplit("-", 1)[0]
        yield f"{a} {b} {score!r}"


def cmd_dataset(args):
    with open(args.raw, encoding="utf-8", errors="replace") as fh:
        rows = list(normalise(fh, args.format))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    print(f"{args.out}: {len(rows)} pairs")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("corpus", help="download and clean enwik9")
    c.add_argument("data_dir")
    c.set_defaults(func=cmd_corpus)
    d = sub.add_parser("dataset", help="convert a published similarity file")
    d.add_argument("raw")
    d.add_argument("out")
    d.add_argument("--format", choices=sorted(_FORMATS), default="wordsim")
    d.set_defaults(func=cmd_dataset)
    args = p.parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
