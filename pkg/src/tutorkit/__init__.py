"""tutorkit: act-annotated bilingual tutoring dialogues, end to end.

Parses bracket-annotated tutoring transcripts, compiles instruction-tuning
datasets, drives a two-step (act selection, then generation) conversational
tutor over pluggable chat providers, scores tutors with a full metric suite,
and serves live tutoring sessions over HTTP.
"""
__version__ = "0.1.0"

from .acts import ActDef, ActId, Taxonomy, TaxonomyError, UnknownActError, load_taxonomy, load_taxonomy_file
from .transcript import (
    ActUtterance,
    ContentTag,
    ParseError,
    Session,
    Turn,
    parse_corpus_text,
    parse_transcript,
    render_corpus,
    render_transcript,
)
from .corpus import CorpusStats, act_distribution, corpus_stats, load_corpus, save_corpus, split_corpus

__all__ = [
    "ActDef",
    "ActId",
    "ActUtterance",
    "ContentTag",
    "CorpusStats",
    "ParseError",
    "Session",
    "Taxonomy",
    "TaxonomyError",
    "Turn",
    "UnknownActError",
    "act_distribution",
    "corpus_stats",
    "load_corpus",
    "load_taxonomy",
    "load_taxonomy_file",
    "parse_corpus_text",
    "parse_transcript",
    "render_corpus",
    "render_transcript",
    "save_corpus",
    "split_corpus",
]
