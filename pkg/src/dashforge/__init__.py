"""dashforge: dashboard synthesis through a structured config.

The config (a small canonical JSON document) records which template a
dashboard uses, its textual defaults, and which analytical component sits
at which grid coordinate. Everything expensive and stochastic stays
upstream: this package only generates configs from artifact sets, applies
atomic modify scripts, and compiles configs into self-contained HTML
deterministically.
"""

from .artifacts import (
    ArtifactSet,
    ChartArtifact,
    Metric,
    MetricGroup,
    TableArtifact,
    classify_artifact,
    load_artifact_dir,
    load_artifact_files,
    load_chart,
    load_metrics,
    load_table,
)
from .errors import DashforgeError
from .gor import GorReport, count_tokens, ensure_same_tokenizer, gor
from .irgen import DefaultProps, assign_layout, generate_config, generate_config_from_refs
from .llm import (
    Exchange,
    HttpProvider,
    Intent,
    ScriptedProvider,
    TableSchema,
    detect_intent,
    expand_generation_prompt,
    expand_intent_prompt,
    expand_modification_prompt,
    extract_modify_script,
    extract_result_files,
    write_transcript,
)
from .model import (
    CONFIG_SUFFIX,
    CONFIG_VERSION,
    ComponentKind,
    ComponentRef,
    Coordinate,
    DashboardConfig,
    TemplateRef,
    deserialize_config,
    read_config,
    serialize_config,
    write_config,
)
from .modify import (
    AddAction,
    ChangeAction,
    DeleteAction,
    ModifyScript,
    SwapAction,
    apply_action,
    apply_script,
    parse_modify_script,
)
from .render import (
    BaseTemplate,
    RenderOutput,
    TemplateRegistry,
    compile_dashboard,
    default_registry,
    fill_slots,
    fragment_chart,
    fragment_metrics,
    fragment_table,
)

__version__ = "0.1.0"

__all__ = [
    "ArtifactSet", "ChartArtifact", "Metric", "MetricGroup", "TableArtifact",
    "classify_artifact", "load_artifact_dir", "load_artifact_files",
    "load_chart", "load_metrics", "load_table",
    "DashforgeError",
    "GorReport", "count_tokens", "ensure_same_tokenizer", "gor",
    "DefaultProps", "assign_layout", "generate_config", "generate_config_from_refs",
    "Exchange", "HttpProvider", "Intent", "ScriptedProvider", "TableSchema",
    "detect_intent", "expand_generation_prompt", "expand_intent_prompt",
    "expand_modification_prompt", "extract_modify_script", "extract_result_files",
    "write_transcript",
    "CONFIG_SUFFIX", "CONFIG_VERSION", "ComponentKind", "ComponentRef",
    "Coordinate", "DashboardConfig", "TemplateRef", "deserialize_config",
    "read_config", "serialize_config", "write_config",
    "AddAction", "ChangeAction", "DeleteAction", "ModifyScript", "SwapAction",
    "apply_action", "apply_script", "parse_modify_script",
    "BaseTemplate", "RenderOutput", "TemplateRegistry", "compile_dashboard",
    "default_registry", "fill_slots", "fragment_chart", "fragment_metrics",
    "fragment_table",
    "__version__",
]
