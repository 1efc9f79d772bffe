"""Command-line front end: train, tag, eval, export-dot.

Exit codes: 0 success, 2 I/O or parse error, 3 evaluation misalignment,
4 compile failure (determinization conflict or state cap). Diagnostics go to
standard error; data goes to files or standard output.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from fstner import kernels
from fstner.corpus import (DEFAULT_TRIGGERS, AlignmentError, ConllFormatError,
                           TagAlphabet, bio_violations, evaluate,
                           format_report, parse_conll, read_token_lines,
                           write_conll)
from fstner.fst import (DeterminizationConflictError, RewriteRuleSpec,
                        RuleSpecError, StateCapExceededError, local_extension,
                        to_dot, trim)
from fstner.model import (ModelFormatError, load_model, save_model,
                          train_model)

logger = logging.getLogger("fstner")

EXIT_OK = 0
EXIT_IO = 2
EXIT_MISALIGNED = 3
EXIT_COMPILE = 4


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_train(args: argparse.Namespace) -> int:
    logger.info("kernel backend: %s", kernels.BACKEND)
    triggers = [w for w in args.triggers.split(",") if w]
    alphabet = TagAlphabet(triggers=triggers)
    corpus = parse_conll(_read(args.train_path), alphabet.bio_tags)
    violations = bio_violations(corpus)
    if violations:
        logger.warning("gold data has %d orphan I-* tag(s); first at "
                       "sentence %d token %d", len(violations),
                       violations[0][0], violations[0][1])
    model = train_model(
        corpus, alphabet,
        lexical_split=args.lexical_split,
        phase1_max=args.rules,
        phase2_max=args.trigger_rules,
        max_context=args.context,
        state_cap=args.state_cap)
    save_model(model, args.model_path)
    logger.info("model written to %s (%d rules, %d transducer states)",
                args.model_path, len(model.rules), model.fst.state_count)
    return EXIT_OK


def cmd_tag(args: argparse.Namespace) -> int:
    model = load_model(args.model_path)
    sentences = read_token_lines(_read(args.input_path))
    tagged = model.tag_corpus(sentences)
    _write(args.output_path, write_conll(tagged))
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    gold = parse_conll(_read(args.gold_path))
    pred = parse_conll(_read(args.pred_path))
    report = evaluate(pred, gold)
    print(format_report(report))
    return EXIT_OK


def _parse_rule_spec(text: str) -> RewriteRuleSpec:
    fields = text.rsplit(":", 2)
    if len(fields) != 3:
        raise RuleSpecError(f"expected 'pattern:position:replacement', got {text!r}")
    pattern_text, pos_text, replacement = fields
    if "," in pattern_text:
        pattern = tuple(s for s in pattern_text.split(",") if s)
    elif pattern_text.isalpha() and pattern_text.islower():
        pattern = tuple(pattern_text)  # toy alphabets: one symbol per character
    else:
        pattern = (pattern_text,)  # a single multi-character tag
    try:
        position = int(pos_text)
    except ValueError:
        raise RuleSpecError(f"position must be an integer, got {pos_text!r}") from None
    return RewriteRuleSpec(pattern, position, replacement)


def cmd_export_dot(args: argparse.Namespace) -> int:
    if args.rule:
        spec = _parse_rule_spec(args.rule)
        symbols = list(dict.fromkeys(spec.pattern + (spec.replacement,)))
        machine = trim(local_extension(spec, symbols))
    else:
        machine = load_model(args.model_path).fst
    _write(args.out_path, to_dot(machine))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fstner",
        description="Train and run a transducer-based named-entity tagger")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a CoNLL-2002 file")
    p.add_argument("train_path")
    p.add_argument("model_path")
    p.add_argument("--lexical-split", type=float, default=0.85,
                   help="fraction of sentences for the lexical tagger")
    p.add_argument("--rules", type=int, default=100,
                   help="cap on phase-1 contextual rules")
    p.add_argument("--trigger-rules", type=int, default=15,
                   help="cap on phase-2 trigger-to-entity rules")
    p.add_argument("--context", type=int, default=2,
                   help="maximum context tags on each side of a rule")
    p.add_argument("--triggers", default=",".join(DEFAULT_TRIGGERS),
                   help="comma-separated trigger words")
    p.add_argument("--state-cap", type=int, default=10 ** 6,
                   help="abort determinization past this many states")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag a tokenized file with a trained model")
    p.add_argument("model_path")
    p.add_argument("input_path")
    p.add_argument("output_path", help="output file, or - for stdout")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="entity-level precision/recall/F1")
    p.add_argument("gold_path")
    p.add_argument("pred_path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-dot", help="Graphviz export of a transducer")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", dest="model_path",
                       help="export a trained model's transducer")
    group.add_argument("--rule",
                       help="export one rule's local extension, e.g. 'aa:0:b'"
                            " or 'TRIG_en,O:1:B-LOC'")
    p.add_argument("out_path", help="output file, or - for stdout")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(message)s", force=True,
                        level=logging.WARNING if args.quiet else logging.INFO)
    try:
        return args.func(args)
    except AlignmentError as exc:
        print(f"fstner: misaligned corpora: {exc}", file=sys.stderr)
        return EXIT_MISALIGNED
    except (DeterminizationConflictError, StateCapExceededError) as exc:
        print(f"fstner: compile failure: {exc}", file=sys.stderr)
        return EXIT_COMPILE
    except (OSError, ConllFormatError, ModelFormatError, RuleSpecError,
            ValueError) as exc:
        print(f"fstner: error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
