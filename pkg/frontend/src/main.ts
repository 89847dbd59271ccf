// DOM wiring: item picker, 31-detent dial, RFR meter, satisfaction
// scale, and submit flow, all driven by the SessionController.

import { HttpTransport } from "./api.js";
import type { RenderResult } from "./api.js";
import { CrossfadePlayer, deviceSupportsQuad } from "./player.js";
import {
  DIAL_MAX,
  SCALE_LABELS,
  SessionController,
  labelAnchor,
  satisfactionLabel,
} from "./state.js";

const RFR_METER_FLOOR_DB = -30;
const RFR_METER_CEIL_DB = 10;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function dialDescription(dial: number): string {
  if (dial < 5) return `narrowing (${dial + 1}/5)`;
  if (dial === 5) return "original stereo";
  if (dial <= 20) return `ambience to rears (${dial - 5}/15)`;
  return `rear boost (+${[1, 3, 5, 7, 9, 11, 13, 15, 17, 20][dial - 21]} dB)`;
}

async function boot(): Promise<void> {
  const fold = deviceSupportsQuad() ? "quad" : "stereo";
  const player = new CrossfadePlayer();
  const transport = new HttpTransport("");
  const status = el<HTMLParagraphElement>("status");
  const meterFill = el<HTMLDivElement>("meter-fill");
  const meterText = el<HTMLSpanElement>("meter-text");

  const onRender = (r: RenderResult) => {
    void player.swap(r.bytes);
    const rfr = r.metrics.rfrDb;
    const frac =
      rfr === -Infinity
        ? 0
        : Math.min(
            Math.max((rfr - RFR_METER_FLOOR_DB) / (RFR_METER_CEIL_DB - RFR_METER_FLOOR_DB), 0),
            1,
          );
    meterFill.style.width = `${(100 * frac).toFixed(1)}%`;
    meterText.textContent =
      rfr === -Infinity ? "RFR: -inf dB (fronts only)" : `RFR: ${rfr.toFixed(1)} dB`;
  };

  const session = new SessionController(transport, {
    sessionId: `web-${Date.now().toString(36)}-${Math.floor(Math.random() * 1e6).toString(36)}`,
    fold,
    onRender,
    onStatus: (msg) => (status.textContent = msg),
  });

  el<HTMLSpanElement>("fold-badge").hidden = fold === "quad";

  const dial = el<HTMLInputElement>("dial");
  const detents = el<HTMLDataListElement>("detents");
  for (let i = 0; i <= DIAL_MAX; i++) {
    const opt = document.createElement("option");
    opt.value = String(i);
    detents.appendChild(opt);
  }
  const dialKnob = el<HTMLDivElement>("dial-knob");
  const dialLabel = el<HTMLSpanElement>("dial-label");
  const updateDialViz = () => {
    const angle = -135 + (270 * session.dial) / DIAL_MAX;
    dialKnob.style.transform = `rotate(${angle}deg)`;
    dialLabel.textContent = `${session.dial}: ${dialDescription(session.dial)}`;
    dial.value = String(session.dial);
  };
  dial.addEventListener("input", () => {
    session.dialChanged(Number(dial.value));
    updateDialViz();
  });

  const scale = el<HTMLInputElement>("satisfaction");
  const scaleLabel = el<HTMLSpanElement>("satisfaction-label");
  const submit = el<HTMLButtonElement>("submit");
  scale.addEventListener("input", () => {
    session.setSatisfaction(Number(scale.value));
    scaleLabel.textContent = satisfactionLabel(Number(scale.value));
    submit.disabled = !session.canSubmit;
  });

  const itemTitle = el<HTMLHeadingElement>("item-title");
  const progress = el<HTMLSpanElement>("progress");
  const refreshItem = () => {
    if (session.complete) {
      el<HTMLDivElement>("panel").hidden = true;
      el<HTMLDivElement>("done").hidden = false;
      void transport.getSummary().then((s) => {
        el<HTMLPreElement>("summary").textContent = JSON.stringify(s, null, 2);
      });
      return;
    }
    const item = session.currentItem;
    itemTitle.textContent = item ? `${item.title} (${item.class_tag})` : "";
    progress.textContent = `item ${session.itemIndex + 1} / ${session.items.length}`;
    scale.value = "0";
    scaleLabel.textContent = "unset";
    submit.disabled = true;
    updateDialViz();
  };

  submit.addEventListener("click", () => {
    void session.submitRating().then(refreshItem);
  });

  // anchor labels under the satisfaction slider
  const anchors = el<HTMLDivElement>("anchors");
  SCALE_LABELS.forEach((label, i) => {
    const span = document.createElement("span");
    span.textContent = label;
    span.title = String(labelAnchor(i));
    anchors.appendChild(span);
  });

  await session.start();
  refreshItem();
}

document.getElementById("start")?.addEventListener("click", () => {
  document.getElementById("start")!.setAttribute("hidden", "");
  void boot().catch((err) => {
    const status = document.getElementById("status");
    if (status) status.textContent = String(err);
  });
});
