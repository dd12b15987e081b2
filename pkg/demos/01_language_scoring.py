"""Scoring and filtering documents by script.

Walks through the language scorer on hand-made snippets, then filters a
small corpus at the default 0.9 threshold and prints the stage report.
"""

from corpusforge import Corpus, Document, LangFilterConfig, filter_language, score_language
from corpusforge.report import stage_summary

# The score is the fraction of classifiable tokens written mostly in the
# Arabic-script blocks Urdu uses. Pure Urdu scores 1.0, pure Latin 0.0.
samples = {
    "pure urdu": "یہ کتاب بہت دلچسپ ہے اور میں نے اسے کل خریدا",
    "pure english": "this sentence contains no urdu at all",
    "half and half": "یہ جملہ half urdu ہے and half english",
    "ascii digits": "123 456 789",
    "urdu digits": "۱۲۳ ۴۵۶ ۷۸۹",
    "punctuation only": "؟ ! ، ۔",
}

print("-- scores --")
for label, text in samples.items():
    print(f"{label:18s} {score_language(text):.3f}")

# Numerals follow their script: ASCII digits count against the target
# language, Extended Arabic-Indic digits count toward it. Tokens without
# any letters or digits are simply ignored.

# Now the corpus-level gate. Anything scoring below the threshold is
# dropped and recorded in the report with a reason code.
docs = [
    Document(id="news-1", source="news", text="وزیراعظم نے آج قوم سے خطاب کیا"),
    Document(id="news-2", source="news", text="breaking news from the capital today"),
    Document(id="web-1", source="web", text="یہ ویب سائٹ اردو content اور english مواد دونوں رکھتی ہے"),
    Document(id="web-2", source="web", text="بارش کے بعد موسم خوشگوار ہو گیا"),
]
corpus = Corpus(docs)

kept, report = filter_language(corpus, LangFilterConfig(threshold=0.9))

print("\n-- filter at 0.9 --")
print(stage_summary(report))
for d in kept:
    print(f"kept    {d.id}: {d.text[:40]}")
for detail in report.drop_details:
    print(f"dropped {detail.doc_id}: {detail.reason}")

# Loosening the threshold keeps the mixed document too.
kept_loose, _ = filter_language(corpus, LangFilterConfig(threshold=0.5))
print(f"\nthreshold 0.5 keeps {len(kept_loose)} of {len(corpus)} docs")
