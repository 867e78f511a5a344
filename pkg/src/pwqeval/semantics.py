"""What the enforcement module would actually do with a parsed file.

Default merging, tolerance of hallucinated parameters, the whole-file
failsafe fallback, functional equivalence between files, and a self-contained
password-acceptance simulator. No PAM stack, shadow file, or cracklib binary
is touched.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Collection

from .parser import ParsedConfig
from .schema import (
    INTEGER,
    IntValue,
    ParameterSchema,
    ParamValue,
    StrValue,
    default_schema,
)

# check_password failure kinds, in the order the checks run.
TOO_SHORT = "too_short"
CLASS_MINIMUM_UNMET = "class_minimum_unmet"
TOO_FEW_CLASSES = "too_few_classes"
INSUFFICIENT_DIFOK = "insufficient_difok"
REPEAT_RUN = "repeat_run"
SEQUENCE_RUN = "sequence_run"
CLASS_REPEAT_RUN = "class_repeat_run"
CONTAINS_USERNAME = "contains_username"
DICTIONARY_WORD = "dictionary_word"
BADWORD = "badword"

ACCEPT = "accept"
REJECT = "reject"

# Fixed ASCII-based classes; anything outside the three named ranges,
# non-ASCII included, counts as "other".
_DIGIT, _UPPER, _LOWER, _OTHER = "digit", "upper", "lower", "other"


@dataclass(frozen=True)
class EffectivePolicy:
    """Fully-resolved parameter map after default merging and failsafe rules.

    ``values`` is total over the schema. ``fell_back=True`` means the file was
    unusable as a whole and every value is a documented default.
    ``ignored_params`` lists hallucinated names that were dropped silently by
    the (simulated) module; they never affect values.
    """

    values: dict[str, ParamValue]
    fell_back: bool = False
    ignored_params: tuple[str, ...] = ()

    def get_int(self, name: str) -> int:
        value = self.values[name]
        if not isinstance(value, IntValue):
            raise TypeError(f"{name} is not an integer parameter")
        return value.value

    def get_str(self, name: str) -> str:
        value = self.values[name]
        if not isinstance(value, StrValue):
            raise TypeError(f"{name} is not a string parameter")
        return value.value


@dataclass(frozen=True)
class PasswordCheckResult:
    verdict: str
    failures: tuple[str, ...]

    def __post_init__(self) -> None:
        if (self.verdict == ACCEPT) != (not self.failures):
            raise ValueError("verdict must be accept exactly when failures is empty")


def load_defaults(schema: ParameterSchema | None = None) -> EffectivePolicy:
    """Policy assigning every parameter its documented default.

    Each call returns an independent value: mutating one result never
    affects another.
    """
    schema = schema or default_schema()
    return EffectivePolicy(values=schema.defaults(), fell_back=False, ignored_params=())


def effective_policy(
    parsed: ParsedConfig, schema: ParameterSchema | None = None
) -> EffectivePolicy:
    """Resolve the policy a file would actually enforce.

    Known assignments with kind-valid values overlay the defaults; unknown
    names are recorded in ``ignored_params`` with no effect. If any known
    parameter carries an invalid value, or the file has damage the real
    module refuses (missing ``=``, bracket headers), the whole file is
    discarded in favor of the failsafe defaults. Hallucinated names are
    still reported after a fallback; only values are reset.
    """
    schema = schema or default_schema()
    values = schema.defaults()
    ignored: list[str] = []
    invalid = False
    for a in parsed.assignments:
        spec = schema.lookup(a.name)
        if spec is None:
            if a.name not in ignored:
                ignored.append(a.name)
            continue
        if spec.value_kind == INTEGER and not isinstance(a.value, IntValue):
            invalid = True
            continue
        values[a.name] = a.value
    fell_back = invalid or parsed.unenforceable()
    if fell_back:
        values = schema.defaults()
    return EffectivePolicy(values=values, fell_back=fell_back, ignored_params=tuple(ignored))


def functionally_equivalent(
    a: ParsedConfig, b: ParsedConfig, schema: ParameterSchema | None = None
) -> bool:
    """True when both files enforce exactly the same policy."""
    return effective_policy(a, schema).values == effective_policy(b, schema).values


def load_wordlist(path: Path | str) -> frozenset[str]:
    """Plain-text wordlist, one word per line; matching is case-insensitive."""
    words = set()
    for line in Path(path).read_text("utf-8").split("\n"):
        word = line.strip()
        if word:
            words.add(word.lower())
    return frozenset(words)


def _char_class(ch: str) -> str:
    if "0" <= ch <= "9":
        return _DIGIT
    if "A" <= ch <= "Z":
        return _UPPER
    if "a" <= ch <= "z":
        return _LOWER
    return _OTHER


def _longest_identical_run(text: str) -> int:
    best = cur = 1
    for prev, ch in zip(text, text[1:]):
        cur = cur + 1 if ch == prev else 1
        best = max(best, cur)
    return best


def _longest_monotonic_run(text: str) -> int:
    """Longest run whose adjacent code points step consistently by +1 or -1."""
    if len(text) < 2:
        return len(text)
    best = cur = 1
    direction = 0
    for prev, ch in zip(text, text[1:]):
        step = ord(ch) - ord(prev)
        if step in (1, -1):
            cur = cur + 1 if step == direction else 2
            direction = step
        else:
            cur = 1
            direction = 0
        best = max(best, cur)
    return best


def _longest_class_run(text: str) -> int:
    return _longest_identical_run("".join(_char_class(ch)[0] for ch in text))


def check_password(
    policy: EffectivePolicy,
    candidate: str,
    old: str | None = None,
    username: str | None = None,
    wordlist: Collection[str] | None = None,
) -> PasswordCheckResult:
    """Simulate the quality checks the resolved policy drives.

    Checks run in order: credit-adjusted length (positive credits add a
    capped bonus, a negative credit -n demands at least n characters of its
    class), distinct-class minimum, new-vs-old character difference, the
    three run limits (0 disables each), user-name checks, dictionary
    membership (skipped without a wordlist), and forbidden-word substrings.
    All failures are collected, not just the first. gecoscheck,
    enforce_for_root, and local_users_only need system context and are inert
    here; retry and enforcing shape the prompting loop, not a single verdict.
    """
    if not candidate:
        raise ValueError("candidate password must be non-empty")

    failures: list[str] = []
    counts = Counter(_char_class(ch) for ch in candidate)

    credits = {
        _DIGIT: policy.get_int("dcredit"),
        _UPPER: policy.get_int("ucredit"),
        _LOWER: policy.get_int("lcredit"),
        _OTHER: policy.get_int("ocredit"),
    }
    effective_len = len(candidate)
    for cls, credit in credits.items():
        if credit > 0:
            effective_len += min(counts[cls], credit)
        elif credit < 0 and counts[cls] < -credit:
            failures.append(CLASS_MINIMUM_UNMET)
    if effective_len < policy.get_int("minlen"):
        failures.append(TOO_SHORT)

    minclass = policy.get_int("minclass")
    if minclass > 0 and sum(1 for c in counts.values() if c) < minclass:
        failures.append(TOO_FEW_CLASSES)

    difok = policy.get_int("difok")
    if old is not None and difok > 0:
        if len(set(candidate) - set(old)) < difok:
            failures.append(INSUFFICIENT_DIFOK)

    maxrepeat = policy.get_int("maxrepeat")
    if maxrepeat > 0 and _longest_identical_run(candidate) > maxrepeat:
        failures.append(REPEAT_RUN)
    maxsequence = policy.get_int("maxsequence")
    if maxsequence > 0 and _longest_monotonic_run(candidate) > maxsequence:
        failures.append(SEQUENCE_RUN)
    maxclassrepeat = policy.get_int("maxclassrepeat")
    if maxclassrepeat > 0 and _longest_class_run(candidate) > maxclassrepeat:
        failures.append(CLASS_REPEAT_RUN)

    lowered = candidate.lower()
    if username:
        user = username.lower()
        if policy.get_int("usercheck") and (user in lowered or user[::-1] in lowered):
            failures.append(CONTAINS_USERNAME)
        usersubstr = policy.get_int("usersubstr")
        if usersubstr > 0 and CONTAINS_USERNAME not in failures:
            windows = (user[i:i + usersubstr] for i in range(len(user) - usersubstr + 1))
            if any(w in lowered for w in windows):
                failures.append(CONTAINS_USERNAME)

    if wordlist is not None and policy.get_int("dictcheck"):
        if lowered in {w.lower() for w in wordlist}:
            failures.append(DICTIONARY_WORD)

    badwords = policy.get_str("badwords").split()
    if badwords and any(word.lower() in lowered for word in badwords):
        failures.append(BADWORD)

    unique = tuple(dict.fromkeys(failures))
    return PasswordCheckResult(
        verdict=ACCEPT if not unique else REJECT, failures=unique
    )
