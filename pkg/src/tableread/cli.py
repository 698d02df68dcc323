"""Command-line interface: parse, run, compare, serve, replay.

Exit codes: 0 success, 1 divergence/unexpected, 2 input or parse errors,
3 provider errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import build_provider, load_app_config
from .errors import ClassificationError, ProviderError, TableReadError
from .orchestrator import (
    Mode,
    SessionConfig,
    create_session,
    export_session,
    run_all,
)
from .providers import ProviderConfig, RecordingProvider, ScriptedProvider, Transcript
from .screenplay import RawScreenplay, parse_screenplay, split_sections
from .serialize import digest, pretty_json

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_PARSE = 2
EXIT_PROVIDER = 3

MODE_ORDER = [Mode.EVAL_PE, Mode.EXP_PE, Mode.EVAL_NO_PE, Mode.REV_NO_PE]


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _add_provider_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--provider", choices=["offline", "http", "scripted"])
    p.add_argument("--transcript", help="transcript for the scripted provider")


def _make_provider(args: argparse.Namespace):
    cfg = load_app_config(
        path=args.config,
        overrides={"provider": args.provider, "transcript": args.transcript},
    )
    return cfg, build_provider(cfg)


def _read_raw(args: argparse.Namespace) -> RawScreenplay:
    text = Path(args.file).read_text(encoding="utf-8")
    body, inline_bios, inline_outline = split_sections(text)
    bios = Path(args.bios).read_text(encoding="utf-8") if args.bios else inline_bios
    outline = (
        Path(args.outline).read_text(encoding="utf-8") if args.outline else inline_outline
    )
    title = args.title or Path(args.file).stem
    return RawScreenplay(title=title, body=body, bios=bios, outline=outline)


def _cmd_parse(args: argparse.Namespace) -> int:
    try:
        raw = _read_raw(args)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        _, provider = _make_provider(args)
        parsed = parse_screenplay(raw, provider)
    except ClassificationError as exc:
        return _fail(EXIT_PARSE, f"classification failed: {exc}")
    except ProviderError as exc:
        return _fail(EXIT_PROVIDER, f"provider failed: {exc}")
    text = pretty_json(parsed.to_dict())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _run_one(raw: RawScreenplay, mode: Mode, roles: list[str], provider):
    parsed = parse_screenplay(raw, provider)
    session = create_session(
        parsed,
        mode,
        roles,
        SessionConfig(embedding_dimension=provider.config.embedding_dimension),
    )
    report = run_all(session, provider)
    return session, report


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        raw = _read_raw(args)
        mode = Mode(args.mode)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    roles = [r.strip() for r in (args.roles or "").split(",") if r.strip()]
    try:
        _, provider = _make_provider(args)
        recorder = None
        if args.record:
            recorder = RecordingProvider(provider)
            provider = recorder
        session, report = _run_one(raw, mode, roles, provider)
    except ClassificationError as exc:
        return _fail(EXIT_PARSE, f"classification failed: {exc}")
    except (ProviderError, TableReadError) as exc:
        code = EXIT_PROVIDER if isinstance(exc, ProviderError) else EXIT_PARSE
        return _fail(code, str(exc))
    export = export_session(session)
    Path(args.out).write_text(pretty_json(report.to_dict()), encoding="utf-8")
    if args.session_out:
        Path(args.session_out).write_text(pretty_json(export), encoding="utf-8")
    if recorder is not None:
        recorder.transcript.header = {
            "title": raw.title,
            "body": raw.body,
            "bios": raw.bios,
            "outline": raw.outline,
            "mode": mode.value,
            "roles": roles,
            "embedding_dimension": provider.config.embedding_dimension,
        }
        recorder.transcript.footer = {
            "session_digest": digest(export),
            "report_digest": digest(report.to_dict()),
        }
        recorder.transcript.save(args.record)
    print(
        f"{mode.value}: {report.instant_count} instant, {report.posthoc_count} posthoc, "
        f"acceptance {report.acceptance_rate}",
        file=sys.stderr,
    )
    return EXIT_OK


_TABLE_ROWS = (
    ("instant_count", "Instant count"),
    ("posthoc_count", "Post-hoc count"),
    ("character_emotions", "Character emotions"),
    ("behavioral_motivation", "Behavioral motivation"),
    ("character_relationships", "Character relationships"),
    ("plot_pacing", "Plot pacing"),
    ("thematic_consistency", "Thematic consistency"),
    ("acceptance_rate", "Acceptance rate"),
)


def comparison_table(reports: dict[str, dict]) -> tuple[str, dict]:
    """Markdown + JSON side-by-side table, one column per mode."""
    modes = [m.value for m in MODE_ORDER]
    table: dict[str, dict[str, object]] = {}
    for key, _label in _TABLE_ROWS:
        row = {}
        for mode in modes:
            rep = reports[mode]
            if key in ("instant_count", "posthoc_count", "acceptance_rate"):
                row[mode] = rep[key]
            else:
                row[mode] = rep["per_dimension"][key]
        table[key] = row
    lines = ["| Metric | " + " | ".join(modes) + " |",
             "|---|" + "---|" * len(modes)]
    for key, label in _TABLE_ROWS:
        cells = " | ".join(str(table[key][m]) for m in modes)
        lines.append(f"| {label} | {cells} |")
    return "\n".join(lines) + "\n", table


def _cmd_compare(args: argparse.Namespace) -> int:
    try:
        raw = _read_raw(args)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    roles = [r.strip() for r in (args.roles or "").split(",") if r.strip()]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports: dict[str, dict] = {}
    try:
        _, provider = _make_provider(args)
        for mode in MODE_ORDER:
            _, report = _run_one(raw, mode, roles, provider)
            reports[mode.value] = report.to_dict()
            (out_dir / f"report-{mode.value}.json").write_text(
                pretty_json(report.to_dict()), encoding="utf-8"
            )
    except ClassificationError as exc:
        return _fail(EXIT_PARSE, f"classification failed: {exc}")
    except (ProviderError, TableReadError) as exc:
        code = EXIT_PROVIDER if isinstance(exc, ProviderError) else EXIT_PARSE
        return _fail(code, str(exc))
    markdown, table = comparison_table(reports)
    (out_dir / "comparison.md").write_text(markdown, encoding="utf-8")
    (out_dir / "comparison.json").write_text(pretty_json(table), encoding="utf-8")
    sys.stdout.write(markdown)
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    cfg = load_app_config(
        path=args.config,
        overrides={
            "provider": args.provider,
            "transcript": args.transcript,
            "store_root": args.store,
            "host": args.host,
            "port": args.port,
        },
    )
    uvicorn.run(create_app(cfg), host=cfg.host, port=cfg.port)
    return EXIT_OK


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        transcript = Transcript.load(args.transcript)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_PARSE, f"cannot load transcript: {exc}")
    header, footer = transcript.header, transcript.footer
    required = {"title", "body", "mode", "roles"}
    if not required.issubset(header) or not footer:
        return _fail(EXIT_PARSE, "transcript lacks run header/footer metadata")
    provider = ScriptedProvider(
        transcript,
        ProviderConfig(
            embedding_dimension=header.get("embedding_dimension", 64)
        ),
    )
    raw = RawScreenplay(
        title=header["title"],
        body=header["body"],
        bios=header.get("bios"),
        outline=header.get("outline"),
    )
    try:
        session, report = _run_one(raw, Mode(header["mode"]), header["roles"], provider)
    except TableReadError as exc:
        print(f"replay diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    session_digest = digest(export_session(session))
    report_digest = digest(report.to_dict())
    if session_digest != footer.get("session_digest") or report_digest != footer.get(
        "report_digest"
    ):
        print("replay diverged: output digests do not match the recording", file=sys.stderr)
        return EXIT_DIVERGED
    print("replay ok: outputs are byte-identical to the recording", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tableread")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a screenplay to structured JSON")
    p.add_argument("file")
    p.add_argument("--bios")
    p.add_argument("--outline")
    p.add_argument("--title")
    p.add_argument("--out")
    _add_provider_args(p)
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("run", help="run one mode over a screenplay")
    p.add_argument("file")
    p.add_argument("--mode", required=True, choices=[m.value for m in MODE_ORDER])
    p.add_argument("--roles", default="")
    p.add_argument("--bios")
    p.add_argument("--outline")
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    p.add_argument("--session-out")
    p.add_argument("--record", help="record the provider transcript to this JSONL file")
    _add_provider_args(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="run all four modes and tabulate")
    p.add_argument("file")
    p.add_argument("--roles", default="")
    p.add_argument("--bios")
    p.add_argument("--outline")
    p.add_argument("--title")
    p.add_argument("--out", required=True)
    _add_provider_args(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--store")
    _add_provider_args(p)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("replay", help="re-run a recorded transcript and verify outputs")
    p.add_argument("transcript")
    p.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
