"""pwqeval: parse pwquality.conf files, simulate their password checks, and
score sets of generated configs for consistency, correctness, hallucination,
and completeness."""

from .corpus import CorpusEntry, CorpusError, bundled_corpus, bundled_documentation, load_corpus
from .harness import (
    GenerationFailure,
    GenerationRecord,
    MockProvider,
    OpenAIChatProvider,
    PolicyPrompt,
    Provider,
    ProviderAuthError,
    ProviderError,
    ProviderTransientError,
    StoredRun,
    generate_responses,
    load_run,
    render_prompt,
    run_generation,
    write_run,
)
from .metrics import (
    CensusEntry,
    ComparisonTriple,
    ConsistencyReport,
    CorrectnessScore,
    SoundnessThresholds,
    SoundnessVerdict,
    avg_consistency,
    avg_correctness,
    hallucination_census,
    response_comparison,
    soundness_verdict,
    verdict_from_parts,
)
from .parser import (
    Assignment,
    Diagnostic,
    LENIENT,
    ParsedConfig,
    STRICT,
    extract_config_from_response,
    parse_config,
    serialize_config,
)
from .report import CellResult, build_report, emit, fraction_decimal, parse_report_json
from .schema import (
    FlagValue,
    IntValue,
    ParamSpec,
    ParameterSchema,
    SchemaError,
    StrValue,
    default_schema,
    parse_schema_text,
    schema_lookup,
)
from .semantics import (
    EffectivePolicy,
    PasswordCheckResult,
    check_password,
    effective_policy,
    functionally_equivalent,
    load_defaults,
    load_wordlist,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CellResult",
    "CensusEntry",
    "ComparisonTriple",
    "ConsistencyReport",
    "CorpusEntry",
    "CorpusError",
    "CorrectnessScore",
    "Diagnostic",
    "EffectivePolicy",
    "FlagValue",
    "GenerationFailure",
    "GenerationRecord",
    "IntValue",
    "LENIENT",
    "MockProvider",
    "OpenAIChatProvider",
    "ParamSpec",
    "ParameterSchema",
    "ParsedConfig",
    "PasswordCheckResult",
    "PolicyPrompt",
    "Provider",
    "ProviderAuthError",
    "ProviderError",
    "ProviderTransientError",
    "STRICT",
    "SchemaError",
    "SoundnessThresholds",
    "SoundnessVerdict",
    "StoredRun",
    "StrValue",
    "avg_consistency",
    "avg_correctness",
    "build_report",
    "bundled_corpus",
    "bundled_documentation",
    "check_password",
    "default_schema",
    "effective_policy",
    "emit",
    "extract_config_from_response",
    "fraction_decimal",
    "functionally_equivalent",
    "generate_responses",
    "hallucination_census",
    "load_corpus",
    "load_defaults",
    "load_run",
    "load_wordlist",
    "parse_config",
    "parse_report_json",
    "parse_schema_text",
    "render_prompt",
    "response_comparison",
    "run_generation",
    "schema_lookup",
    "serialize_config",
    "soundness_verdict",
    "verdict_from_parts",
    "write_run",
]
