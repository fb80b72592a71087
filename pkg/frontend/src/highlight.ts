import { Finding } from "./api.js";

export interface Segment {
  text: string;
  finding?: Finding;
}

/** Split text into plain and highlighted segments from the findings' spans.
 * Spans are half-open [start, end) into the snapshot text; overlaps are
 * clipped in span order so segments always tile the text exactly. */
export function segmentText(text: string, findings: Finding[]): Segment[] {
  const ordered = [...findings].sort((a, b) => a.span[0] - b.span[0]);
  const segments: Segment[] = [];
  let cursor = 0;
  for (const finding of ordered) {
    const start = Math.max(finding.span[0], cursor);
    const end = Math.min(finding.span[1], text.length);
    if (end <= start) continue;
    if (start > cursor) segments.push({ text: text.slice(cursor, start) });
    segments.push({ text: text.slice(start, end), finding });
    cursor = end;
  }
  if (cursor < text.length) segments.push({ text: text.slice(cursor) });
  return segments;
}

/** Confidences render with exactly two decimals of the API value. */
export function formatConfidence(confidence: number): string {
  return confidence.toFixed(2);
}

export function describeFinding(finding: Finding): string {
  const parts = Object.entries(finding.distribution)
    .sort((a, b) => b[1] - a[1])
    .map(([label, p]) => `${label} ${formatConfidence(p)}`);
  return `${finding.label} ${formatConfidence(finding.confidence)} | ${parts.join("  ")}`;
}

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Overlay markup for the editor backdrop. */
export function overlayHtml(text: string, findings: Finding[]): string {
  return segmentText(text, findings)
    .map((segment) => {
      const safe = escapeHtml(segment.text);
      if (!segment.finding) return safe;
      const label = segment.finding.label;
      return `<mark class="hl hl-${escapeHtml(label)}" title="${escapeHtml(
        describeFinding(segment.finding),
      )}">${safe}</mark>`;
    })
    .join("");
}
