"""Regenerates tests/data/vader_golden.tsv with the reference vaderSentiment package.

Usage: python3 scripts/make_vader_golden.py  (requires vaderSentiment==3.3.2)

Each post is first stripped of URLs, @handles and $cashtags with the same
whitespace-token rule the C++ scorer applies, then scored. The compound is
written unrounded.
"""
import math
import pathlib

from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer, normalize

ROOT = pathlib.Path(__file__).resolve().parent.parent


def strip_noise(text):
    kept = []
    for tok in text.split():
        low = tok[:8].lower()
        if low.startswith(("http://", "https://", "www.")):
            continue
        if len(tok) > 1 and tok[0] == "@":
            continue
        if len(tok) > 1 and tok[0] == "$" and tok[1].isalpha():
            continue
        kept.append(tok)
    return " ".join(kept)


class Unrounded(SentimentIntensityAnalyzer):
    def score_valence(self, sentiments, text):
        if not sentiments:
            return {"compound": 0.0}
        s = float(sum(sentiments))
        amp = self._punctuation_emphasis(text)
        if s > 0:
            s += amp
        elif s < 0:
            s -= amp
        return {"compound": normalize(s)}


def main():
    analyzer = Unrounded(lexicon_file=str(ROOT / "data" / "vader_lexicon.txt"))
    posts = (ROOT / "tests" / "data" / "vader_corpus.txt").read_text().splitlines()
    posts = [p for p in posts if p.strip()]
    out = ["text\tcompound"]
    for p in posts:
        c = analyzer.polarity_scores(strip_noise(p))["compound"]
        assert math.isfinite(c)
        out.append(f"{p}\t{c!r}")
    (ROOT / "tests" / "data" / "vader_golden.tsv").write_text("\n".join(out) + "\n")
    print(f"wrote {len(posts)} entries")


if __name__ == "__main__":
    main()
