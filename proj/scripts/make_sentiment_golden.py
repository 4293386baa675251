"""Regenerate tests/data/sentiment_golden.tsv from vaderSentiment 3.3.2.

Scores are taken at full precision (the reference rounds its outputs).
Sentences avoid constructions the scorer does not model: "kind of",
"sort of", idioms, question marks, "least", "without", and
"never" followed by "so"/"this".
"""

import pathlib
import sys

import vaderSentiment.vaderSentiment as vs

vs.round = lambda x, n=0: x

SENTENCES = [
    "The harvest was very good!",
    "Farmers are happy with the new seed varieties.",
    "Drought destroyed most of the maize crop.",
    "Prices fell sharply and traders were worried.",
    "The ministry announced a new irrigation programme.",
    "Yields were not good this season.",
    "The rains did not fail, and growers were relieved.",
    "Locusts caused terrible damage across the region.",
    "The cooperative reported a great year for members.",
    "Fertilizer subsidies are extremely helpful to smallholders.",
    "The outbreak is a serious threat to livestock.",
    "Rainfall was good but the harvest was poor.",
    "The market looked weak, but exports recovered strongly.",
    "Harvests are GOOD despite the heat.",
    "The outlook is BAD for coffee growers!!",
    "Farmers are incredibly optimistic about the new varieties!!!",
    "Hunger remains a grave concern in the north.",
    "Researchers found the technology effective and affordable.",
    "The flood was a disaster for rice farmers.",
    "Extension officers gave useful advice.",
    "It isn't a bad result for the first season.",
    "The plan doesn't help poor households.",
    "Growers aren't worried about the forecast.",
    "The loans were hardly enough to cover costs.",
    "Investment in storage is slightly better than last year.",
    "The pest spread quickly and farmers lost everything.",
    "The new dam brings hope to the valley.",
    "Officials warned of severe food shortages.",
    "The scheme has been a remarkable success.",
    "Wheat prices rose, hurting urban consumers.",
    "Maize output rose by ten percent.",
    "The agency will publish its report in March.",
    "The weather was nice; the crops were healthy.",
    "Farmers praised the government for fast support.",
    "Conflict has disrupted supply chains and trade.",
    "Soil erosion continues to damage fertile land.",
    "The training was fun and very informative.",
    "Poor roads make it difficult to reach markets.",
    "Traders are afraid of another price collapse.",
    "The drought-tolerant seed is a real advantage.",
    "Nobody expected such a strong recovery.",
    "The rains were late, but farmers remained hopeful.",
    "Climate change threatens food security.",
    "The harvest festival was a joyful celebration!",
    "The company was accused of fraud and corruption.",
    "Farmers do not trust the new insurance product.",
    "Most households are not happy with the prices.",
    "The support programme is absolutely wonderful.",
    "Access to credit remains a big problem.",
    "The report was neither good nor bad.",
    "The storm killed cattle and destroyed homes.",
    "The VERY BAD floods ruined the rice fields.",
    "Exports increased and the sector is thriving.",
    "Growers are frustrated, angry and exhausted.",
    "The minister said the situation is under control.",
    "Irrigation improved yields significantly.",
    "The disease is deadly but treatment is cheap.",
    "Experts are uncertain about next year.",
    "Cocoa farmers welcomed the higher prices!",
    "The cooperative failed to pay its members.",
    "Rural youth see little opportunity in farming.",
    "Seed sales were remarkably strong.",
    "The new variety is resistant to disease and pests.",
    "Women farmers won an award for innovation.",
    "The heatwave was horrible for poultry farms.",
    "Farmers were not very pleased with the delay.",
    "The dry spell isn't over yet.",
    "Hope is growing among dairy farmers.",
]


# Hand-segmented sentences of toy document doc05.
DOC05 = [
    "The fall armyworm pest has devastated maize crops across southern Africa.",
    "The insect eats leaves and cobs, destroying whole fields within days.",
    "Governments are rushing to supply pesticides, but farmers say help is too slow.",
    "Researchers warn the pest could spread further if not controlled.",
]


def document_scores(analyzer, sentences):
    rows = [analyzer.polarity_scores(s) for s in sentences]
    n = len(rows)
    mean = {k: sum(r[k] for r in rows) / n for k in ("pos", "neg", "neu", "compound")}
    z = mean["pos"] + mean["neg"] + mean["neu"]
    return {"pos": mean["pos"] / z, "neg": mean["neg"] / z, "neu": mean["neu"] / z, "compound": mean["compound"]}


def main() -> int:
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data/sentiment_golden.tsv")
    analyzer = vs.SentimentIntensityAnalyzer()
    with out.open("w", encoding="utf-8") as f:
        f.write("sentence\tpos\tneg\tneu\tcompound\n")
        for s in SENTENCES:
            r = analyzer.polarity_scores(s)
            f.write(f"{s}\t{r['pos']!r}\t{r['neg']!r}\t{r['neu']!r}\t{r['compound']!r}\n")
    doc = document_scores(analyzer, DOC05)
    doc_out = out.with_name("doc05_sentiment.tsv")
    with doc_out.open("w", encoding="utf-8") as f:
        f.write("doc_id\tpos\tneg\tneu\tcompound\n")
        f.write(f"doc05\t{doc['pos']!r}\t{doc['neg']!r}\t{doc['neu']!r}\t{doc['compound']!r}\n")
    print(f"wrote {len(SENTENCES)} sentences to {out} and {doc_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
