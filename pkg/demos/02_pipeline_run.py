"""End-to-end curation of a small synthetic corpus.

Builds a mixed corpus with known problems planted in it (English docs,
boilerplate without function words, near-copies, an email address, one
over-long document), runs the whole pipeline, and prints the per-stage
accounting plus the final reduction table.
"""

import random

from corpusforge import Corpus, Document, run_pipeline
from corpusforge.report import render_report, stage_summary

STOP = "کا کی کے کو نے سے پر ہے ہیں اور".split()
CONTENT = "کتاب مدرسہ دریا پہاڑ سورج چاند ستارہ بادل بارش درخت".split()

rng = random.Random(7)


def urdu_sentenceish(n):
    # every third token a function word, the rest content words
    words = [STOP[rng.randrange(len(STOP))] if j % 3 == 0 else CONTENT[rng.randrange(len(CONTENT))] for j in range(n)]
    return " ".join(words)


docs = []
# healthy documents from two sources
for i in range(8):
    docs.append(Document(id=f"web-{i}", source="web", text=urdu_sentenceish(40)))
for i in range(6):
    docs.append(Document(id=f"news-{i}", source="news", text=urdu_sentenceish(35)))

# planted problems, one of each kind
docs.append(Document(id="english", source="web", text="this page is entirely in english and should not pass"))
docs.append(Document(id="boilerplate", source="web", text=" ".join(CONTENT * 5)))
docs.append(Document(id="near-copy", source="web", text=docs[0].text.replace(" ", "  ")))
docs.append(Document(id="cross-copy", source="news", text=" " + docs[1].text))
docs.append(Document(id="leaky", source="web", text=urdu_sentenceish(20) + " رابطہ ali@example.com"))
docs.append(Document(id="longread", source="news", text=urdu_sentenceish(1200)))

corpus = Corpus(docs)
print(f"input: {len(corpus)} docs, {corpus.total_tokens} tokens\n")

clean, report = run_pipeline(corpus)

print("-- stage accounting --")
for stage in report.stages:
    print(stage_summary(stage))

# The chain is conservative: what leaves one stage enters the next.
for prev, nxt in zip(report.stages, report.stages[1:]):
    assert nxt.docs_in == prev.docs_out
    assert nxt.tokens_in == prev.tokens_out

print("\n-- planted problems, as caught --")
by_stage = {s.stage: s for s in report.stages}
for stage_name in ("lang_filter", "quality_filter", "dedup"):
    for d in by_stage[stage_name].drop_details:
        kept = f" (kept {d.kept_id})" if d.kept_id else ""
        print(f"{stage_name}: dropped {d.doc_id} [{d.reason}]{kept}")

scrubbed = next(d for d in clean if d.id.startswith("leaky"))
print(f"pii_scrub: leaky -> ...{scrubbed.text[-30:]}")

split_ids = [d.id for d in clean if d.id.startswith("longread")]
print(f"split: longread -> {split_ids}")

print("\n-- reduction table --")
print(render_report(report))
