import { Finding, ScreenResponse, Transport } from "./api.js";

export type RequestState = "idle" | "pending" | "error";

export interface ViewState {
  text: string;
  /** The exact text that produced lastResult; highlights are valid only while
   * the editor still shows it. */
  snapshot: string | null;
  lastResult: ScreenResponse | null;
  requestState: RequestState;
  error: string | null;
  minConfidence: number;
  hiddenLabels: ReadonlySet<string>;
}

/** View-model for the screener page. One request in flight at a time; a
 * submission made while pending is queued and sent next. The store never
 * mutates the user's text. */
export class ScreenStore {
  state: ViewState = {
    text: "",
    snapshot: null,
    lastResult: null,
    requestState: "idle",
    error: null,
    minConfidence: 0,
    hiddenLabels: new Set(),
  };

  onChange: (() => void) | null = null;
  private queued = false;

  constructor(private transport: Transport) {}

  private notify(): void {
    this.onChange?.();
  }

  edit(text: string): void {
    this.state.text = text;
    this.notify();
  }

  /** Highlights are stale as soon as the editor no longer shows the snapshot. */
  get stale(): boolean {
    return this.state.snapshot === null || this.state.text !== this.state.snapshot;
  }

  async submit(): Promise<void> {
    if (this.state.requestState === "pending") {
      this.queued = true; // sent (with the then-current text) after this one lands
      return;
    }
    const text = this.state.text;
    this.state.requestState = "pending";
    this.state.error = null;
    this.notify();
    try {
      const result = await this.transport(text);
      this.state.lastResult = result;
      this.state.snapshot = text;
      this.state.requestState = "idle";
    } catch (err) {
      // the editor content is preserved; the banner offers a retry
      this.state.error = err instanceof Error ? err.message : String(err);
      this.state.requestState = "error";
    }
    this.notify();
    if (this.queued) {
      this.queued = false;
      void this.submit(); // runs with the newest text; callers of the first
    } // submit are not held up by the queued one
  }

  setMinConfidence(value: number): void {
    this.state.minConfidence = Math.min(1, Math.max(0, value));
    this.notify();
  }

  toggleLabel(label: string): void {
    const hidden = new Set(this.state.hiddenLabels);
    if (hidden.has(label)) hidden.delete(label);
    else hidden.add(label);
    this.state.hiddenLabels = hidden;
    this.notify();
  }

  /** Findings currently visible: none while stale, otherwise the last
   * response filtered by the slider and class toggles, in response order
   * (confidence descending). */
  visibleFindings(): Finding[] {
    if (this.stale || !this.state.lastResult) return [];
    return this.state.lastResult.findings.filter(
      (f) =>
        f.confidence >= this.state.minConfidence && !this.state.hiddenLabels.has(f.label),
    );
  }
}
