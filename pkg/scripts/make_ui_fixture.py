#!/usr/bin/env python3
"""Produce recorded session fixtures for the web client's tests.

Each fixture bundles a parsed screenplay document, the ordered event feed a
live SSE subscription would deliver, and the final session export. Written
to frontend/tests/fixtures/ by default.

    python3 scripts/make_ui_fixture.py [--out frontend/tests/fixtures]
"""

import argparse
import sys
from pathlib import Path

from tableread.offline import OfflineProvider
from tableread.orchestrator import (
    Mode,
    SessionConfig,
    create_session,
    export_session,
    mark_value,
    run_all,
)
from tableread.screenplay import RawScreenplay, parse_screenplay
from tableread.serialize import pretty_json

HERE = Path(__file__).parent
ROLES = ["Youth", "Soldier A", "Soldier B"]


def build_fixture(raw: RawScreenplay, mode: Mode, roles: list[str], marks: int = 0) -> dict:
    provider = OfflineProvider()
    parsed = parse_screenplay(raw, provider)
    session = create_session(
        parsed, mode, roles,
        SessionConfig(embedding_dimension=provider.config.embedding_dimension),
        clock=lambda: "2026-01-01T00:00:00Z",
    )
    run_all(session, provider)
    targets = []
    if marks and session.inner_thoughts:
        targets.append(session.inner_thoughts[0].id)
    if marks > 1 and session.feedback_log:
        targets.append(session.feedback_log[-1].candidate.id)
    for target in targets[:marks]:
        mark_value(session, target)
    return {
        "session_id": session.id,
        "mode": mode.value,
        "screenplay": parsed.to_dict(),
        "events": session.events,
        "export": export_session(session),
    }


def hundred_line_play() -> str:
    lines = ["INT. LONG CORRIDOR - NIGHT", ""]
    speakers = ["VERA", "ODELL"]
    i = 0
    while len(lines) < 98:
        lines.append(f"{speakers[i % 2]}: Corridor beat number {i} keeps the walk going.")
        i += 1
    lines.append("EXT. DOOR - DAWN")
    lines.append("VERA: We made it to line one hundred.")
    assert len(lines) == 100
    return "\n".join(lines)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(HERE.parent / "frontend" / "tests" / "fixtures"))
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    raw = RawScreenplay(
        title="The Platform",
        body=(HERE / "sample_play.txt").read_text(encoding="utf-8"),
        bios=(HERE / "sample_bios.txt").read_text(encoding="utf-8"),
        outline="A stranger waits at a dying station while two soldiers keep their vigil.",
    )
    fixtures = {
        "evalpe.json": build_fixture(raw, Mode.EVAL_PE, ROLES, marks=2),
        "evalnope.json": build_fixture(raw, Mode.EVAL_NO_PE, ROLES),
        "long100.json": build_fixture(
            RawScreenplay(title="Corridor", body=hundred_line_play()),
            Mode.EVAL_NO_PE,
            ["Vera"],
        ),
    }
    for name, fixture in fixtures.items():
        path = out_dir / name
        path.write_text(pretty_json(fixture), encoding="utf-8")
        print(f"wrote {path} ({len(fixture['events'])} events)", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
