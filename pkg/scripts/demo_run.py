#!/usr/bin/env python3
"""Run all four feedback modes offline over the bundled sample screenplay.

Writes per-mode reports, session exports, and the side-by-side comparison
into demo-output/ and prints the comparison table. No network, no model:
the offline provider fabricates deterministic responses.

    python3 scripts/demo_run.py [--out demo-output]
"""

import argparse
import sys
from pathlib import Path

from tableread.cli import MODE_ORDER, comparison_table
from tableread.offline import OfflineProvider
from tableread.orchestrator import SessionConfig, create_session, export_session, run_all
from tableread.screenplay import RawScreenplay, parse_screenplay
from tableread.serialize import pretty_json

HERE = Path(__file__).parent
ROLES = ["Youth", "Soldier A", "Soldier B"]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo-output")
    args = parser.parse_args()

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    raw = RawScreenplay(
        title="The Platform",
        body=(HERE / "sample_play.txt").read_text(encoding="utf-8"),
        bios=(HERE / "sample_bios.txt").read_text(encoding="utf-8"),
        outline="A stranger waits at a dying station while two soldiers keep their vigil.",
    )
    provider = OfflineProvider()
    reports = {}
    for mode in MODE_ORDER:
        parsed = parse_screenplay(raw, provider)
        roles = [] if mode.value == "RevNoPE" else ROLES
        session = create_session(
            parsed, mode, roles,
            SessionConfig(embedding_dimension=provider.config.embedding_dimension),
        )
        report = run_all(session, provider)
        reports[mode.value] = report.to_dict()
        (out_dir / f"report-{mode.value}.json").write_text(
            pretty_json(report.to_dict()), encoding="utf-8"
        )
        (out_dir / f"session-{mode.value}.json").write_text(
            pretty_json(export_session(session)), encoding="utf-8"
        )
        print(
            f"{mode.value:9s} instant={report.instant_count:2d} "
            f"posthoc={report.posthoc_count:2d} "
            f"assessed={report.candidates_assessed:2d}",
            file=sys.stderr,
        )

    markdown, table = comparison_table(reports)
    (out_dir / "comparison.md").write_text(markdown, encoding="utf-8")
    (out_dir / "comparison.json").write_text(pretty_json(table), encoding="utf-8")
    print()
    print(markdown)
    print(f"artifacts in {out_dir}/", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
