"""Provider layer: structured retries, fingerprints, record/replay, HTTP."""

import json

import httpx
import pytest

from helpers import CannedProvider, SOLDIER_BODY

from tableread.errors import (
    AuthError,
    ContractError,
    DimensionMismatch,
    ScriptMiss,
    StructureError,
    TransportError,
)
from tableread.offline import OfflineProvider
from tableread.prompts import available_templates, render
from tableread.providers import (
    ChatRequest,
    HttpProvider,
    ProviderConfig,
    RecordingProvider,
    ScriptedProvider,
    Transcript,
    complete_structured,
    embed_fingerprint,
    request_fingerprint,
)


def persona_request(**kwargs) -> ChatRequest:
    defaults = dict(
        template_id="persona",
        variables={"character": "A", "bio": "", "outline": "", "scene_excerpts": "x"},
        expects_structure=True,
        schema_id="persona",
    )
    defaults.update(kwargs)
    return ChatRequest(**defaults)


VALID_PERSONA = json.dumps(
    {"background": "b", "traits": ["t"], "goals": "g", "motivations": "m"}
)


class TestChatRequest:
    def test_schema_id_iff_structured(self):
        with pytest.raises(ContractError):
            ChatRequest("persona", {}, expects_structure=True, schema_id=None)
        with pytest.raises(ContractError):
            ChatRequest("persona", {}, expects_structure=False, schema_id="persona")

    def test_temperature_bounds(self):
        with pytest.raises(ContractError):
            ChatRequest("persona", {}, temperature=2.5)


class TestFingerprint:
    def test_whitespace_normalized(self):
        a = persona_request(variables={"character": "A ", "bio": "x\n\ny", "outline": "", "scene_excerpts": "s"})
        b = persona_request(variables={"character": "A", "bio": "x  y", "outline": "", "scene_excerpts": "s"})
        assert request_fingerprint(a) == request_fingerprint(b)

    def test_meta_excluded(self):
        a = persona_request(meta={"agent": "A"})
        b = persona_request(meta={})
        assert request_fingerprint(a) == request_fingerprint(b)

    def test_variables_matter(self):
        a = persona_request()
        b = persona_request(variables={"character": "B", "bio": "", "outline": "", "scene_excerpts": "x"})
        assert request_fingerprint(a) != request_fingerprint(b)

    def test_embed_fingerprint_order_sensitive(self):
        assert embed_fingerprint(["a", "b"]) != embed_fingerprint(["b", "a"])


class TestCompleteStructured:
    def test_valid_first_try_single_request(self):
        provider = CannedProvider({"persona": VALID_PERSONA})
        value = complete_structured(persona_request(), provider)
        assert value["background"] == "b"
        assert len(provider.requests) == 1

    def test_malformed_then_valid_two_requests(self):
        responses = iter(["{broken", VALID_PERSONA])
        provider = CannedProvider({"persona": lambda req: next(responses)})
        value = complete_structured(persona_request(), provider)
        assert value["goals"] == "g"
        assert len(provider.requests) == 2
        assert "repair_hint" in provider.requests[1].variables

    def test_zero_retries_malformed_raises(self):
        provider = CannedProvider(
            {"persona": "nope"},
            config=ProviderConfig(max_retries=0, embedding_dimension=8),
        )
        with pytest.raises(StructureError):
            complete_structured(persona_request(), provider)
        assert len(provider.requests) == 1

    def test_request_count_bounded(self):
        provider = CannedProvider(
            {"persona": "nope"},
            config=ProviderConfig(max_retries=3, embedding_dimension=8),
        )
        with pytest.raises(StructureError):
            complete_structured(persona_request(), provider)
        assert len(provider.requests) == 1 + 3

    def test_schema_violation_retried(self):
        bad = json.dumps({"background": "", "traits": [], "goals": "g", "motivations": "m"})
        responses = iter([bad, VALID_PERSONA])
        provider = CannedProvider({"persona": lambda req: next(responses)})
        assert complete_structured(persona_request(), provider)["traits"] == ["t"]

    def test_unstructured_request_rejected(self):
        provider = CannedProvider({"persona": VALID_PERSONA})
        with pytest.raises(ContractError):
            complete_structured(
                ChatRequest("persona", {"x": "y"}), provider
            )

    def test_fenced_json_accepted(self):
        provider = CannedProvider({"persona": f"```json\n{VALID_PERSONA}\n```"})
        assert complete_structured(persona_request(), provider)["background"] == "b"


class TestEmbedContract:
    def test_arity_and_dimension(self):
        provider = OfflineProvider(ProviderConfig(embedding_dimension=16))
        vectors = provider.embed(["a", "b"])
        assert len(vectors) == 2
        assert all(len(v) == 16 for v in vectors)

    def test_empty_batch_rejected(self):
        provider = OfflineProvider()
        with pytest.raises(ContractError):
            provider.embed([])
        with pytest.raises(ContractError):
            provider.embed(["ok", "  "])

    def test_dimension_mismatch_detected(self):
        provider = CannedProvider({}, embedder=lambda t: [0.5, 0.5])  # dim 2, config 8
        with pytest.raises(DimensionMismatch):
            provider.embed(["a"])


class TestScriptedProvider:
    def _transcript(self):
        recorder = RecordingProvider(CannedProvider({"persona": VALID_PERSONA}))
        complete_structured(persona_request(), recorder)
        recorder.embed(["alpha", "beta"])
        return recorder.transcript

    def test_same_request_same_response(self):
        scripted = ScriptedProvider(self._transcript(), ProviderConfig(embedding_dimension=8))
        first = scripted.complete(persona_request())
        second = scripted.complete(persona_request())
        assert first == second == VALID_PERSONA

    def test_unknown_fingerprint_misses(self):
        scripted = ScriptedProvider(self._transcript())
        with pytest.raises(ScriptMiss):
            scripted.complete(
                persona_request(variables={"character": "Z", "bio": "", "outline": "", "scene_excerpts": "x"})
            )

    def test_embed_replay(self):
        transcript = self._transcript()
        scripted = ScriptedProvider(transcript, ProviderConfig(embedding_dimension=8))
        inner = CannedProvider({})
        assert scripted.embed(["alpha", "beta"]) == inner.embed(["alpha", "beta"])
        with pytest.raises(ScriptMiss):
            scripted.embed(["gamma"])

    def test_save_load_round_trip(self, tmp_path):
        transcript = self._transcript()
        transcript.header = {"note": "x"}
        transcript.footer = {"digest": "y"}
        path = tmp_path / "t.jsonl"
        transcript.save(path)
        loaded = Transcript.load(path)
        assert loaded.header == {"note": "x"}
        assert loaded.footer == {"digest": "y"}
        assert [e.fingerprint for e in loaded.entries] == [
            e.fingerprint for e in transcript.entries
        ]
        scripted = ScriptedProvider(loaded, ProviderConfig(embedding_dimension=8))
        assert scripted.complete(persona_request()) == VALID_PERSONA


class TestOfflineProvider:
    def test_deterministic(self):
        p = OfflineProvider()
        req = ChatRequest(
            "enact",
            {"character": "A", "context": "c", "line": "A: hi", "scene_heading": "s"},
            expects_structure=True,
            schema_id="thought",
        )
        assert p.complete(req) == p.complete(req)

    def test_covers_every_template(self):
        p = OfflineProvider()
        base = {
            "title": "t", "numbered_body": "0: INT. A - DAY", "body": "INT. A - DAY",
            "heading": "INT. A - DAY", "numbered_lines": "0: x", "lines_json": "[\"x\"]",
            "character": "A", "bio": "", "outline": "", "scene_excerpts": "x",
            "context": "c", "line": "A: a line of speech here", "scene_heading": "INT. A - DAY",
            "scene_text": "A: a line of speech here", "experience": "e",
            "background": "b", "screenplay": "INT. A - DAY", "public_text": "p",
            "thoughts": "th", "question": "q", "rationale": "r", "dimensions": "plot_pacing",
            "evidence": "-", "memories": "m",
        }
        import jsonschema

        from tableread.schemas import SCHEMAS

        template_schema = {
            "segment": "segment", "classify": "classify", "persona": "persona",
            "enact": "thought", "instant_actor": "candidates",
            "instant_character": "candidates", "posthoc_actor": "candidates",
            "posthoc_character": "candidates", "posthoc_actor_nope": "candidates",
            "posthoc_reviewer": "candidates", "summary": "summary",
            "assess_instant": "assessment", "assess_posthoc": "assessment",
        }
        assert sorted(template_schema) == available_templates()
        for template_id, schema_id in template_schema.items():
            req = ChatRequest(
                template_id, dict(base), expects_structure=True, schema_id=schema_id
            )
            payload = json.loads(p.complete(req))
            jsonschema.validate(payload, SCHEMAS[schema_id])

    def test_embeddings_deterministic_and_bounded(self):
        p = OfflineProvider(ProviderConfig(embedding_dimension=32))
        a = p.embed(["one text"])[0]
        b = p.embed(["one text"])[0]
        assert a == b
        assert all(-1.0 <= x <= 1.0 for x in a)


class TestTemplates:
    def test_render_fills_placeholders(self):
        text = render("enact", {
            "character": "Youth", "context": "CTX", "line": "LINE", "scene_heading": "H",
        })
        assert "Youth" in text and "CTX" in text and "LINE" in text

    def test_missing_placeholder_raises(self):
        with pytest.raises(KeyError):
            render("enact", {"character": "Youth"})

    def test_repair_hint_appended(self):
        text = render("enact", {
            "character": "Y", "context": "c", "line": "l", "scene_heading": "h",
            "repair_hint": "FIX IT",
        })
        assert text.endswith("FIX IT")


def _http_provider(handler, **config_kwargs) -> HttpProvider:
    config = ProviderConfig(endpoint="http://provider.test/v1", **config_kwargs)
    return HttpProvider(config, transport=httpx.MockTransport(handler))


class TestHttpProvider:
    def test_happy_path(self, monkeypatch):
        monkeypatch.setenv("TABLEREAD_API_KEY", "sk-test-secret")

        def handler(request: httpx.Request) -> httpx.Response:
            assert request.headers["Authorization"] == "Bearer sk-test-secret"
            body = json.loads(request.content)
            assert body["messages"][0]["role"] == "user"
            return httpx.Response(
                200, json={"choices": [{"message": {"content": "hello"}}]}
            )

        provider = _http_provider(handler)
        req = ChatRequest(
            "enact",
            {"character": "A", "context": "c", "line": "l", "scene_heading": "h"},
        )
        assert provider.complete(req) == "hello"

    def test_missing_credential(self, monkeypatch):
        monkeypatch.delenv("TABLEREAD_API_KEY", raising=False)
        provider = _http_provider(lambda r: httpx.Response(200, json={}))
        with pytest.raises(AuthError):
            provider.complete(ChatRequest("enact", {"character": "A", "context": "c", "line": "l", "scene_heading": "h"}))

    def test_rejected_credential(self, monkeypatch):
        monkeypatch.setenv("TABLEREAD_API_KEY", "bad")
        provider = _http_provider(lambda r: httpx.Response(401, json={}))
        with pytest.raises(AuthError):
            provider.complete(ChatRequest("enact", {"character": "A", "context": "c", "line": "l", "scene_heading": "h"}))

    def test_server_error_is_transport(self, monkeypatch):
        monkeypatch.setenv("TABLEREAD_API_KEY", "k")
        provider = _http_provider(lambda r: httpx.Response(500, text="boom"))
        with pytest.raises(TransportError):
            provider.complete(ChatRequest("enact", {"character": "A", "context": "c", "line": "l", "scene_heading": "h"}))

    def test_network_error_is_transport(self, monkeypatch):
        monkeypatch.setenv("TABLEREAD_API_KEY", "k")

        def handler(request):
            raise httpx.ConnectError("refused")

        provider = _http_provider(handler)
        with pytest.raises(TransportError):
            provider.complete(ChatRequest("enact", {"character": "A", "context": "c", "line": "l", "scene_heading": "h"}))

    def test_embeddings_endpoint(self, monkeypatch):
        monkeypatch.setenv("TABLEREAD_API_KEY", "k")

        def handler(request: httpx.Request) -> httpx.Response:
            assert request.url.path.endswith("/embeddings")
            return httpx.Response(
                200, json={"data": [{"embedding": [0.0] * 63 + [1.0]}]}
            )

        provider = _http_provider(handler)
        assert len(provider.embed(["x"])[0]) == 64


class TestSecretScrubbing:
    def test_secret_never_reaches_outputs(self, monkeypatch, tmp_path):
        secret = "sk-super-secret-value-9181"
        monkeypatch.setenv("TABLEREAD_API_KEY", secret)
        from tableread.orchestrator import Mode, SessionConfig, create_session, export_session, run_all
        from tableread.screenplay import RawScreenplay, parse_screenplay
        from tableread.serialize import pretty_json

        recorder = RecordingProvider(OfflineProvider())
        raw = RawScreenplay(title="S", body=SOLDIER_BODY)
        parsed = parse_screenplay(raw, recorder)
        session = create_session(parsed, Mode.EVAL_PE, ["Youth"], SessionConfig())
        report = run_all(session, recorder)
        transcript_path = tmp_path / "t.jsonl"
        recorder.transcript.save(transcript_path)
        blob = "\n".join(
            [
                transcript_path.read_text(encoding="utf-8"),
                pretty_json(export_session(session)),
                pretty_json(report.to_dict()),
            ]
        )
        assert secret not in blob
