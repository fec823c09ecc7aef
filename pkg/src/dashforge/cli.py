"""Command-line surface for batch dashboard generation and modification.

Analytical artifacts are expected on disk, produced out of band; no command
here executes analysis code. Reports go to stdout as JSON, human-readable
progress to stderr. Exit codes: 0 ok, 1 pipeline error, 2 usage/IO error.
Mutating commands write temp-then-rename, so a failure anywhere leaves the
original files untouched.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from pathlib import Path

from .artifacts import load_artifact_files
from .errors import DashforgeError
from .gor import gor
from .irgen import DefaultProps, generate_config_from_refs
from .llm import (
    ScriptedProvider,
    HttpProvider,
    TableSchema,
    expand_generation_prompt,
    expand_modification_prompt,
    extract_modify_script,
    extract_result_files,
)
from .model import (
    CONFIG_SUFFIX,
    ComponentKind,
    ComponentRef,
    TemplateRef,
    read_config,
    serialize_config,
)
from .modify import apply_script, parse_modify_script
from .render import TemplateRegistry, compile_dashboard, default_registry

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_USAGE = 2


class _StageFailure(Exception):
    def __init__(self, stage: str, code: int, message: str) -> None:
        super().__init__(message)
        self.stage = stage
        self.code = code


@contextmanager
def _stage(name: str):
    """Label failures with the pipeline stage they occurred in."""
    try:
        yield
    except _StageFailure:
        raise
    except DashforgeError as exc:
        raise _StageFailure(name, EXIT_PIPELINE, str(exc)) from exc
    except OSError as exc:
        raise _StageFailure(name, EXIT_USAGE, str(exc)) from exc


def _registry(args) -> TemplateRegistry:
    if args.templates:
        return TemplateRegistry(Path(args.templates))
    return default_registry()


def _provider(args):
    if args.transcript:
        with _stage("provider:load"):
            return ScriptedProvider.from_file(args.transcript)
    if args.provider_url:
        with _stage("provider:init"):
            return HttpProvider(args.provider_url, args.model)
    raise _StageFailure("provider:init", EXIT_USAGE, "pass --transcript or --provider-url")


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _emit(report: dict) -> None:
    print(json.dumps(report, ensure_ascii=False))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_generate(args) -> int:
    table_path = Path(args.table)
    artifact_dir = Path(args.artifact_dir) if args.artifact_dir else table_path.parent
    out_base = Path(args.out) if args.out else table_path.with_suffix("")

    with _stage("load:table"):
        if not table_path.is_file():
            raise FileNotFoundError(f"table not found: {table_path}")
        schema = TableSchema.from_csv(table_path)
    with _stage("prompt:expand"):
        prompt = expand_generation_prompt(args.prompt, schema)
    provider = _provider(args)
    with _stage("provider:complete"):
        response = provider.complete(prompt)
    with _stage("extract:files"):
        files = extract_result_files(response)
    registry = _registry(args)
    with _stage("load:artifacts"):
        refs = [ComponentRef(ComponentKind.for_path(name), name) for name in files]
        artifacts = load_artifact_files(artifact_dir, files, strict=args.strict)
    with _stage("irgen"):
        defaults = DefaultProps(title=args.title, footnote=args.footnote, font_color=args.font_color)
        config = generate_config_from_refs(refs, TemplateRef(args.template), defaults, registry)
    with _stage("compile"):
        output = compile_dashboard(config, artifacts, registry)
    with _stage("write"):
        config_path = out_base.with_name(out_base.name + CONFIG_SUFFIX)
        dashboard_path = out_base.with_name(out_base.name + ".html")
        _write_atomic(config_path, serialize_config(config))
        _write_atomic(dashboard_path, output.html.encode("utf-8"))

    report = gor(response, output.html)
    _note(f"wrote {config_path} and {dashboard_path}")
    _emit({
        "command": "generate",
        "config_path": str(config_path),
        "dashboard_path": str(dashboard_path),
        "files": files,
        "placements": len(config.placements),
        "gor": report.to_json_dict(),
    })
    return EXIT_OK


def cmd_modify(args) -> int:
    config_path = Path(args.config)
    artifact_dir = Path(args.artifact_dir) if args.artifact_dir else config_path.parent
    if args.out:
        out_base = Path(args.out)
        out_config = out_base.with_name(out_base.name + CONFIG_SUFFIX)
        out_dashboard = out_base.with_name(out_base.name + ".html")
    else:
        out_config = config_path
        out_dashboard = _dashboard_path_for(config_path)

    with _stage("load:config"):
        config = read_config(config_path)
    with _stage("load:table"):
        schema = TableSchema.from_csv(args.table)
    with _stage("prompt:expand"):
        prompt = expand_modification_prompt(args.prompt, schema, config)
    provider = _provider(args)
    with _stage("provider:complete"):
        response = provider.complete(prompt)
    with _stage("extract:script"):
        script_text, files = extract_modify_script(response)
    with _stage("parse:script"):
        script = parse_modify_script(script_text, files)
    registry = _registry(args)
    with _stage("apply"):
        template = registry.load(config.template_id)
        updated = apply_script(config, script, columns=template.columns)
    with _stage("load:artifacts"):
        paths = [ref.path for _, ref in updated.sorted_placements()]
        artifacts = load_artifact_files(artifact_dir, paths, strict=args.strict)
    with _stage("compile"):
        output = compile_dashboard(updated, artifacts, registry)
    with _stage("write"):
        _write_atomic(out_config, serialize_config(updated))
        _write_atomic(out_dashboard, output.html.encode("utf-8"))

    report = gor(response, output.html)
    _note(f"applied {len(script.actions)} action(s); wrote {out_config} and {out_dashboard}")
    _emit({
        "command": "modify",
        "config_path": str(out_config),
        "dashboard_path": str(out_dashboard),
        "actions": len(script.actions),
        "new_files": list(script.new_files),
        "gor": report.to_json_dict(),
    })
    return EXIT_OK


def cmd_render(args) -> int:
    config_path = Path(args.config)
    artifact_dir = Path(args.artifact_dir) if args.artifact_dir else config_path.parent
    out_path = Path(args.out) if args.out else _dashboard_path_for(config_path)

    with _stage("load:config"):
        config = read_config(config_path)
    with _stage("load:artifacts"):
        paths = [ref.path for _, ref in config.sorted_placements()]
        artifacts = load_artifact_files(artifact_dir, paths, strict=args.strict)
    with _stage("compile"):
        output = compile_dashboard(config, artifacts, _registry(args))
    with _stage("write"):
        _write_atomic(out_path, output.html.encode("utf-8"))

    _note(f"wrote {out_path}")
    _emit({
        "command": "render",
        "dashboard_path": str(out_path),
        "bytes": len(output.html.encode("utf-8")),
        "placements": len(output.manifest),
    })
    return EXIT_OK


def cmd_validate(args) -> int:
    config_path = Path(args.config)
    artifact_dir = Path(args.artifact_dir) if args.artifact_dir else config_path.parent
    violations: list[dict] = []

    config = None
    with _stage("read:config"):
        raw = config_path.read_bytes()
    try:
        from .model import deserialize_config

        config = deserialize_config(raw)
    except DashforgeError as exc:
        violations.append({"code": "schema", "detail": str(exc)})

    if config is not None:
        template = None
        try:
            template = _registry(args).load(config.template_id)
        except DashforgeError as exc:
            violations.append({"code": "template", "detail": str(exc)})
        for coord, ref in config.sorted_placements():
            if template is not None and coord.position not in template.columns:
                violations.append({
                    "code": "column",
                    "coordinate": str(coord),
                    "detail": f"column {coord.position!r} not declared by template {config.template_id!r}",
                })
            if not (artifact_dir / ref.path).is_file():
                violations.append({
                    "code": "dangling",
                    "coordinate": str(coord),
                    "detail": f"artifact path not found: {ref.path}",
                })

    _emit({"command": "validate", "valid": not violations, "violations": violations})
    return EXIT_OK if not violations else EXIT_PIPELINE


def cmd_gor(args) -> int:
    with _stage("read:llm_output"):
        llm_text = Path(args.llm_output).read_text(encoding="utf-8")
    with _stage("read:dashboard"):
        dashboard_text = Path(args.dashboard).read_text(encoding="utf-8")
    with _stage("gor"):
        report = gor(llm_text, dashboard_text)
    _emit(report.to_json_dict())
    return EXIT_OK


def _dashboard_path_for(config_path: Path) -> Path:
    name = config_path.name
    if name.endswith(CONFIG_SUFFIX):
        return config_path.with_name(name[: -len(CONFIG_SUFFIX)] + ".html")
    return config_path.with_suffix(".html")


def _add_provider_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--transcript", help="scripted provider transcript file")
    parser.add_argument("--provider-url", help="chat-completion endpoint URL")
    parser.add_argument("--model", default="default", help="model name for the HTTP provider")


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--artifact-dir", help="directory holding analytical artifacts")
    parser.add_argument("--templates", help="template registry directory (default: bundled)")
    parser.add_argument("--strict", action="store_true", help="enforce strict artifact validation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dashforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a config and dashboard from a user table")
    p.add_argument("table", help="user table CSV")
    p.add_argument("--prompt", required=True, help="user request text")
    p.add_argument("--template", required=True, help="base template id")
    p.add_argument("--title", default="", help="dashboard title (default: Dashboard)")
    p.add_argument("--footnote", default="", help="dashboard footnote")
    p.add_argument("--font-color", default="", help="font color (default: #FFFFFF)")
    p.add_argument("--out", help="output base path (writes BASE.dbconfig.json and BASE.html)")
    _add_common_flags(p)
    _add_provider_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("modify", help="apply a model-produced modify script to a config")
    p.add_argument("config", help="existing config file")
    p.add_argument("--prompt", required=True, help="user request text")
    p.add_argument("--table", required=True, help="user table CSV")
    p.add_argument("--out", help="output base path (default: update in place)")
    _add_common_flags(p)
    _add_provider_flags(p)
    p.set_defaults(func=cmd_modify)

    p = sub.add_parser("render", help="compile a config into a dashboard document")
    p.add_argument("config", help="config file")
    p.add_argument("--out", help="output dashboard path")
    _add_common_flags(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("validate", help="report config invariant violations")
    p.add_argument("config", help="config file")
    _add_common_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gor", help="token overhead of an LLM output vs a dashboard file")
    p.add_argument("llm_output", help="file holding the raw LLM output text")
    p.add_argument("dashboard", help="compiled dashboard file")
    p.set_defaults(func=cmd_gor)

    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _StageFailure as failure:
        _note(f"error at stage {failure.stage}: {failure}")
        return failure.code


if __name__ == "__main__":
    sys.exit(main())
