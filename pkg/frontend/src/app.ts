import { fetchHealth, makeTransport } from "./api.js";
import { describeFinding, formatConfidence, overlayHtml } from "./highlight.js";
import { ScreenStore } from "./store.js";

const LABELS = ["GENDER", "RACE", "AGE", "AMBIGUOUS"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function defaultBaseUrl(): string {
  const stored = localStorage.getItem("biaslens-gateway");
  if (stored) return stored;
  return `${location.protocol === "https:" ? "https" : "http"}://127.0.0.1:8080`;
}

export function boot(): void {
  const editor = el<HTMLTextAreaElement>("editor");
  const backdrop = el<HTMLDivElement>("backdrop");
  const findingsList = el<HTMLUListElement>("findings");
  const countBadge = el<HTMLSpanElement>("count");
  const slider = el<HTMLInputElement>("threshold");
  const sliderValue = el<HTMLSpanElement>("threshold-value");
  const banner = el<HTMLDivElement>("banner");
  const retry = el<HTMLButtonElement>("retry");
  const submit = el<HTMLButtonElement>("submit");
  const gatewayInput = el<HTMLInputElement>("gateway");
  const health = el<HTMLSpanElement>("health");
  const toggles = el<HTMLDivElement>("toggles");

  gatewayInput.value = defaultBaseUrl();
  let store = new ScreenStore(makeTransport(gatewayInput.value));

  const render = () => {
    const visible = store.visibleFindings();
    backdrop.innerHTML = store.stale
      ? overlayHtml(store.state.text, [])
      : overlayHtml(store.state.snapshot ?? "", visible);
    countBadge.textContent = String(visible.length);
    findingsList.innerHTML = "";
    if (visible.length === 0) {
      const li = document.createElement("li");
      li.className = "empty";
      li.textContent = store.stale && store.state.lastResult
        ? "edited since last check - submit again"
        : "no findings";
      findingsList.appendChild(li);
    }
    for (const finding of visible) {
      const li = document.createElement("li");
      li.className = `finding hl-${finding.label}`;
      li.title = describeFinding(finding);
      const tag = document.createElement("span");
      tag.className = "tag";
      tag.textContent = `${finding.label} ${formatConfidence(finding.confidence)}`;
      const text = document.createElement("span");
      text.textContent = finding.sentence;
      li.append(tag, text);
      findingsList.appendChild(li);
    }
    banner.hidden = store.state.requestState !== "error";
    if (store.state.error) banner.querySelector("span")!.textContent = store.state.error;
    submit.disabled = store.state.requestState === "pending";
    submit.textContent = store.state.requestState === "pending" ? "checking..." : "check";
  };
  store.onChange = render;

  editor.addEventListener("input", () => store.edit(editor.value));
  editor.addEventListener("scroll", () => {
    backdrop.scrollTop = editor.scrollTop;
    backdrop.scrollLeft = editor.scrollLeft;
  });
  editor.addEventListener("keydown", (event) => {
    if ((event.ctrlKey || event.metaKey) && event.key === "Enter") void store.submit();
  });
  submit.addEventListener("click", () => void store.submit());
  retry.addEventListener("click", () => void store.submit());

  slider.addEventListener("input", () => {
    store.setMinConfidence(Number(slider.value));
    sliderValue.textContent = formatConfidence(Number(slider.value));
  });

  for (const label of LABELS) {
    const wrap = document.createElement("label");
    wrap.className = `toggle hl-${label}`;
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.addEventListener("change", () => store.toggleLabel(label));
    wrap.append(box, document.createTextNode(label));
    toggles.appendChild(wrap);
  }

  gatewayInput.addEventListener("change", () => {
    localStorage.setItem("biaslens-gateway", gatewayInput.value);
    store = new ScreenStore(makeTransport(gatewayInput.value));
    store.onChange = render;
    store.edit(editor.value);
    void probeHealth();
  });

  const probeHealth = async () => {
    try {
      const status = await fetchHealth(gatewayInput.value);
      health.textContent = status.status === "ready"
        ? `ready (${status.parallelism} workers)`
        : "loading...";
      health.className = status.status;
    } catch {
      health.textContent = "unreachable";
      health.className = "down";
    }
  };
  void probeHealth();
  setInterval(() => void probeHealth(), 5000);
  render();
}

boot();
