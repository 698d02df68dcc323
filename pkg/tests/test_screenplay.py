"""Parser: segmentation, classification, characters, personas."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import CannedProvider, SOLDIER_BODY

from tableread.errors import ClassificationError
from tableread.providers import ProviderConfig
from tableread.screenplay import (
    ParserConfig,
    RawScreenplay,
    Scene,
    ScriptLine,
    build_persona,
    classify_lines,
    extract_bio,
    extract_characters,
    fallback_segment,
    normalize_body,
    segment_scenes,
    split_sections,
)


def raw(body: str, **kwargs) -> RawScreenplay:
    return RawScreenplay(title="t", body=body, **kwargs)


class TestNormalization:
    def test_crlf_and_trailing_whitespace(self):
        assert normalize_body("a  \r\nb\t\r\nc") == "a\nb\nc"

    def test_blank_lines_preserved(self):
        assert normalize_body("a\n\n\nb") == "a\n\n\nb"

    def test_empty_body_rejected(self):
        with pytest.raises(ValueError):
            RawScreenplay(title="t", body="   \n  \n")


class TestFallbackSegment:
    def test_two_headings_split(self):
        body = "INT. Coffee Shop - DAY\nA beat.\nEXT. STREET - NIGHT\nAnother beat."
        scenes = fallback_segment(raw(body))
        assert [s.heading for s in scenes] == ["INT. Coffee Shop - DAY", "EXT. STREET - NIGHT"]
        assert [s.index for s in scenes] == [0, 1]

    def test_lowercase_heading_is_boundary(self):
        scenes = fallback_segment(raw("ext. beach - night\nWaves."))
        assert scenes[0].heading == "ext. beach - night"
        assert scenes[0].heading_is_line

    def test_midline_token_is_not_boundary(self):
        scenes = fallback_segment(raw("He walks into the INT. of the cave.\nDark."))
        assert len(scenes) == 1
        assert scenes[0].heading == "SCENE 1"
        assert not scenes[0].heading_is_line

    def test_no_heading_single_synthetic_scene(self):
        scenes = fallback_segment(raw("Just some prose.\nMore prose."))
        assert len(scenes) == 1
        assert scenes[0].heading == "SCENE 1"

    def test_preamble_before_first_heading(self):
        scenes = fallback_segment(raw("Title card.\nINT. HALL - DAY\nA door."))
        assert len(scenes) == 2
        assert scenes[0].heading == "SCENE 1"
        assert scenes[1].heading == "INT. HALL - DAY"

    def test_ie_variant(self):
        scenes = fallback_segment(raw("I/E CAR - DUSK\nDriving."))
        assert scenes[0].heading_is_line

    def test_configurable_pattern(self):
        config = ParserConfig(heading_prefixes=("SZENE",))
        scenes = fallback_segment(raw("SZENE 1 - MORGEN\nText.\nINT. X\nY"), config)
        assert len(scenes) == 1 or scenes[0].heading == "SZENE 1 - MORGEN"
        assert scenes[0].heading == "SZENE 1 - MORGEN"

    def test_round_trip_exact(self):
        scenes = fallback_segment(raw(SOLDIER_BODY))
        joined = "\n".join("\n".join(s.body_lines) for s in scenes)
        assert joined == normalize_body(SOLDIER_BODY)

    def test_deterministic(self):
        a = fallback_segment(raw(SOLDIER_BODY))
        b = fallback_segment(raw(SOLDIER_BODY))
        assert [s.body_lines for s in a] == [s.body_lines for s in b]

    @given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=400))
    @settings(max_examples=60, deadline=None)
    def test_round_trip_property(self, body):
        try:
            screenplay = raw(body)
        except ValueError:
            return
        scenes = fallback_segment(screenplay)
        joined = "\n".join("\n".join(s.body_lines) for s in scenes)
        assert joined == normalize_body(body)
        assert [s.index for s in scenes] == list(range(len(scenes)))


class TestSegmentScenes:
    def _provider(self, spans):
        return CannedProvider(
            {"segment": json.dumps({"scenes": spans})},
            config=ProviderConfig(max_retries=0, embedding_dimension=8),
        )

    def test_valid_provider_segmentation_accepted(self):
        body = "INT. A - DAY\none\nEXT. B - NIGHT\ntwo"
        provider = self._provider(
            [
                {"heading": "INT. A - DAY", "start_line": 0, "end_line": 2},
                {"heading": "EXT. B - NIGHT", "start_line": 2, "end_line": 4},
            ]
        )
        scenes = segment_scenes(raw(body), provider)
        assert [s.heading for s in scenes] == ["INT. A - DAY", "EXT. B - NIGHT"]

    def test_provider_dropping_text_falls_back(self):
        body = "INT. A - DAY\none\nEXT. B - NIGHT\ntwo"
        provider = self._provider(
            [{"heading": "INT. A - DAY", "start_line": 0, "end_line": 2}]  # drops half
        )
        diagnostics = []
        scenes = segment_scenes(raw(body), provider, diagnostics=diagnostics)
        joined = "\n".join("\n".join(s.body_lines) for s in scenes)
        assert joined == normalize_body(body)  # byte-span coverage restored by fallback
        assert diagnostics

    def test_provider_overlap_falls_back(self):
        body = "INT. A - DAY\none\ntwo"
        provider = self._provider(
            [
                {"heading": "INT. A - DAY", "start_line": 0, "end_line": 2},
                {"heading": "X", "start_line": 1, "end_line": 3},
            ]
        )
        scenes = segment_scenes(raw(body), provider)
        assert len(scenes) == 1

    def test_garbage_provider_output_falls_back(self):
        provider = CannedProvider(
            {"segment": "not json at all"},
            config=ProviderConfig(max_retries=0, embedding_dimension=8),
        )
        scenes = segment_scenes(raw("INT. A - DAY\nx"), provider)
        assert scenes[0].heading == "INT. A - DAY"


class TestClassifyLines:
    def test_speaker_canonicalized_from_all_caps(self, offline_provider):
        scene = Scene(0, "INT. A - DAY", ["INT. A - DAY", "SOLDIER A: We hold the line."], True)
        lines = classify_lines(scene, offline_provider)
        assert lines[0].kind == "heading"
        assert lines[1].kind == "dialogue"
        assert lines[1].speaker == "Soldier A"

    def test_action_line_has_no_speaker(self, offline_provider):
        scene = Scene(0, "SCENE 1", ["The youth stares at the station sign."], False)
        lines = classify_lines(scene, offline_provider)
        assert lines[0].kind == "action"
        assert lines[0].speaker is None

    def test_bijection_and_order(self, offline_provider):
        body_lines = ["INT. A - DAY", "", "ODell: One.", "Beat.", "ODELL: Two."]
        scene = Scene(0, "INT. A - DAY", body_lines, True)
        lines = classify_lines(scene, offline_provider)
        assert len(lines) == len(body_lines)
        assert [l.text for l in lines] == body_lines
        assert [l.line_index for l in lines] == list(range(len(body_lines)))

    def test_reassembly_matches_scene_body(self, offline_provider):
        scene = Scene(0, "INT. A - DAY", ["INT. A - DAY", "MOSS: Hi there."], True)
        lines = classify_lines(scene, offline_provider)
        assert "\n".join(l.text for l in lines) == scene.text()

    def test_invalid_labels_exhaust_retries(self):
        provider = CannedProvider(
            {"classify": json.dumps({"lines": [{"kind": "action", "speaker": None}]})},
            config=ProviderConfig(max_retries=1, embedding_dimension=8),
        )
        scene = Scene(0, "SCENE 1", ["one", "two"], False)  # count mismatch every time
        with pytest.raises(ClassificationError):
            classify_lines(scene, provider)
        assert len(provider.requests) == 2  # 1 + max_retries

    def test_malformed_then_valid(self):
        responses = iter(
            [
                "not json",
                json.dumps({"lines": [{"kind": "action", "speaker": None}]}),
            ]
        )
        provider = CannedProvider(
            {"classify": lambda req: next(responses)},
            config=ProviderConfig(max_retries=2, embedding_dimension=8),
        )
        scene = Scene(0, "SCENE 1", ["a lone line"], False)
        lines = classify_lines(scene, provider)
        assert lines[0].kind == "action"
        assert len(provider.requests) == 2


class TestScriptLineInvariants:
    def test_dialogue_requires_speaker(self):
        with pytest.raises(ValueError):
            ScriptLine(0, 1, "dialogue", "hello")

    def test_heading_only_at_index_zero(self):
        with pytest.raises(ValueError):
            ScriptLine(0, 3, "heading", "INT. X")

    def test_non_dialogue_rejects_speaker(self):
        with pytest.raises(ValueError):
            ScriptLine(0, 1, "action", "x", speaker="Y")


class TestExtractCharacters:
    def test_first_appearance_order_and_dedupe(self):
        lines = [
            ScriptLine(0, 0, "dialogue", "a", speaker="Soldier A"),
            ScriptLine(0, 1, "dialogue", "b", speaker="Youth"),
            ScriptLine(1, 0, "dialogue", "c", speaker="SOLDIER A"),
        ]
        assert extract_characters(lines) == ["Soldier A", "Youth"]

    def test_no_dialogue_empty(self):
        assert extract_characters([ScriptLine(0, 0, "action", "x")]) == []

    def test_parsed_fixture_characters(self, soldier_parsed):
        assert soldier_parsed.characters == ["Soldier A", "Soldier B", "Youth"]


class TestBios:
    def test_colon_and_dash_formats(self):
        bios = "Youth: drifts between towns.\n\nSoldier A - keeps hope like a ration."
        assert "drifts" in extract_bio(bios, "Youth")
        assert "ration" in extract_bio(bios, "soldier a")
        assert extract_bio(bios, "Soldier B") is None


class TestSplitSections:
    def test_delimited_sections_extracted(self):
        text = (
            "INT. A - DAY\nA line.\n\n=== BIOS ===\nVera: keeps the room.\n"
            "\n=== OUTLINE ===\nOne night at the station."
        )
        body, bios, outline = split_sections(text)
        assert body == "INT. A - DAY\nA line."
        assert bios == "Vera: keeps the room."
        assert outline == "One night at the station."

    def test_plain_file_byte_identical(self):
        text = "INT. A - DAY  \r\nA line.\n"
        body, bios, outline = split_sections(text)
        assert body == text  # untouched so downstream normalization is the only pass
        assert bios is None and outline is None

    def test_delimiter_case_insensitive(self):
        body, bios, _ = split_sections("x\n=== bios ===\nB: someone.")
        assert body == "x"
        assert bios == "B: someone."


class TestBuildPersona:
    def test_merged_when_bio_and_scenes(self, soldier_parsed):
        assert soldier_parsed.personas["Youth"].source == "merged"
        assert soldier_parsed.personas["Soldier A"].source == "merged"

    def test_synthesized_without_bio(self, soldier_parsed):
        assert soldier_parsed.personas["Soldier B"].source == "synthesized"

    def test_scripted_fields_pass_through(self, soldier_parsed, soldier_raw):
        profile = json.dumps(
            {
                "background": "Exact background.",
                "traits": ["blunt", "patient"],
                "goals": "Exact goals.",
                "motivations": "Exact motivations.",
            }
        )
        provider = CannedProvider({"persona": profile})
        persona = build_persona("Youth", soldier_parsed, soldier_raw, provider)
        assert persona.background == "Exact background."
        assert persona.traits == ["blunt", "patient"]
        assert persona.goals == "Exact goals."
        assert persona.motivations == "Exact motivations."


class TestParseScreenplay:
    def test_every_character_has_persona(self, soldier_parsed):
        assert set(soldier_parsed.personas) == set(soldier_parsed.characters)

    def test_round_trip_serialization(self, soldier_parsed):
        from tableread.screenplay import ParsedScreenplay

        doc = soldier_parsed.to_dict()
        again = ParsedScreenplay.from_dict(doc)
        assert again.to_dict() == doc

    def test_lines_cover_scenes(self, soldier_parsed):
        for scene in soldier_parsed.scenes:
            texts = [l.text for l in soldier_parsed.scene_lines(scene.index)]
            assert texts == scene.body_lines
