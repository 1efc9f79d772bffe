"""fstner: named-entity tagging with learned rewrite rules compiled into a
single deterministic finite-state transducer."""

from fstner.corpus import (DEFAULT_TRIGGERS, AlignmentError, ConllFormatError,
                           EvalReport, TagAlphabet, evaluate, parse_conll,
                           relabel_for_training, split_corpus, write_conll)
from fstner.fst import (WILDCARD, DeterminizationConflictError, PackedFst,
                        RewriteRuleSpec, RuleSpecError, StateCapExceededError,
                        SubsequentialTransducer, Transducer, compose,
                        determinize, enumerate_paths, expand_wildcards,
                        identity_transducer, kmp_next, local_extension, run,
                        to_dot, trim)
from fstner.lexical import (LexicalModel, Trie, shape_encode, tag_sentence,
                            tag_token, train_lexical)
from fstner.model import NerModel, load_model, save_model, train_model
from fstner.tbl import (ContextualRule, LearnedRule, apply_rule,
                        compile_rules, enumerate_candidates, learn_rules,
                        score_rule)

__version__ = "0.1.0"
