/** Wire types matching the service's JSON documents. */

export type LineKind = "heading" | "action" | "dialogue";

export interface ScriptLine {
  scene_index: number;
  line_index: number;
  kind: LineKind;
  speaker: string | null;
  text: string;
}

export interface SceneDoc {
  index: number;
  heading: string;
  body_lines: string[];
  heading_is_line: boolean;
}

export interface ScreenplayDoc {
  schema_version: number;
  title: string;
  scenes: SceneDoc[];
  lines: ScriptLine[];
  characters: string[];
  personas: Record<string, unknown>;
  diagnostics?: string[];
}

export interface InnerThought {
  id: string;
  agent: string;
  scene_index: number;
  line_index: number;
  interpretation: string;
  recall_notes: string;
  objective: string;
  synthesis: string;
  marked: boolean;
}

export interface EvidenceRef {
  source: string;
  span: string;
}

export interface Candidate {
  id: string;
  agent_or_source: string;
  timing: "instant" | "posthoc";
  scene_index: number;
  line_index: number | null;
  question: string;
  rationale: string;
  dimensions: string[];
  evidence_refs: EvidenceRef[];
}

export interface VerdictDoc {
  candidate_id: string;
  results: { criterion: string; passed: boolean; note: string }[];
  usefulness: "low" | "high" | null;
  accepted: boolean;
}

export interface FeedbackItem {
  candidate: Candidate;
  verdict: VerdictDoc;
  marked: boolean;
}

export interface StepEventData {
  line: ScriptLine;
  inner_thought: InnerThought | null;
  accepted_instant: FeedbackItem[];
  scene_complete: boolean;
}

export interface MarkDoc {
  target_id: string;
  character: string;
  scene_content: string;
  scene_number: number;
  feedback_type: "inner_thought" | "instant" | "posthoc";
  created_at: string;
}

export interface SessionExport {
  schema_version: number;
  id: string;
  mode: string;
  activated: string[];
  cursor: number;
  public_context: ScriptLine[];
  inner_thoughts: InnerThought[];
  feedback_log: FeedbackItem[];
  marks: MarkDoc[];
  screenplay: ScreenplayDoc;
}

export type FeedEvent =
  | { event: "step"; data: StepEventData }
  | { event: "posthoc"; data: FeedbackItem }
  | { event: "mark"; data: MarkDoc };

export function renderLineText(line: ScriptLine): string {
  return line.kind === "dialogue" ? `${line.speaker}: ${line.text}` : line.text;
}
