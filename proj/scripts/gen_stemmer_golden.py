#!/usr/bin/env python3
"""Write tests/golden/stemmer.tsv: word<TAB>stem pairs from NLTK's Porter
stemmer in ORIGINAL_ALGORITHM mode.

The vocabulary is a fixed list of suffix-rule exercisers plus every label
token of the bundled toy dataset.
"""

import re
from pathlib import Path

from nltk.stem.porter import PorterStemmer

ROOT = Path(__file__).resolve().parent.parent

WORDS = """
caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing
happy sky relational conditional rational valenci hesitanci digitizer
conformabli radicalli differentli vileli analogousli vietnamization predication
operator feudalism decisiveness hopefulness callousness formaliti sensitiviti
sensibiliti triplicate formative formalize electriciti electrical hopeful
goodness revival allowance inference airliner gyroscopic adjustable defensible
irritant replacement adjustment dependent adoption homologou communism
activate angulariti homologous effective bowdlerize probate rate cease
controll roll generalization oscillators running runs runner ran easily
fairly agreement generously argument arguing national nationalize traditional
connections connected connecting connection knowledge knowledgeable relativity
possibly hopelessness beautifully organization organizational computers
computing computed computation cradle player directed director directing
films filming starring actors actress cities city population populations
countries country dates birthplace locations generally operational
""".split()


def toy_tokens():
    tokens = set()
    for name in ("kb1_attrs.tsv", "kb2_attrs.tsv"):
        path = ROOT / "data" / "toy" / name
        if not path.exists():
            continue
        for line in path.read_text(encoding="utf-8").splitlines():
            cols = line.split("\t")
            if len(cols) >= 4 and cols[3] == "string":
                tokens.update(t for t in re.split(r"[^a-z0-9]+", cols[2].lower()) if t)
    return tokens


def main():
    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    vocab = sorted({w for w in set(WORDS) | toy_tokens() if len(w) > 2 and w.isalpha()})
    out = ROOT / "tests" / "golden" / "stemmer.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for w in vocab:
            f.write(f"{w}\t{stemmer.stem(w)}\n")


if __name__ == "__main__":
    main()
