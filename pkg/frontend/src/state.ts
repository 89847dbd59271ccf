// Session state machine for the adjustment loop, kept free of DOM and
// audio concerns so it can be driven headlessly in tests. Playback and
// rendering are injected callbacks.

import type { Fold, ItemEntry, RenderResult, Transport } from "./api.js";

export const DIAL_MIN = 0;
export const DIAL_MAX = 30;
export const STEREO_REFERENCE_DIAL = 5;

// seven anchors, five steps between adjacent labels: integers -15..+15
export const SCALE_LABELS = [
  "much worse",
  "worse",
  "slightly worse",
  "same",
  "slightly better",
  "better",
  "much better",
] as const;

export function labelAnchor(index: number): number {
  return -15 + 5 * index;
}

export function satisfactionLabel(value: number): string {
  const nearest = Math.round((value + 15) / 5);
  const exact = labelAnchor(nearest) === value ? "" : "~";
  return exact + SCALE_LABELS[Math.min(Math.max(nearest, 0), 6)];
}

export interface ControllerOptions {
  sessionId: string;
  fold: Fold;
  now?: () => number; // ms clock, injectable for tests
  onRender?: (r: RenderResult) => void;
  onStatus?: (msg: string) => void;
  retry?: (fn: () => void, ms: number) => void;
}

export class SessionController {
  items: ItemEntry[] = [];
  itemIndex = -1;
  dial = STEREO_REFERENCE_DIAL;
  satisfaction: number | null = null;
  trace: [number, number][] = [];
  complete = false;

  private transport: Transport;
  private opts: Required<ControllerOptions>;
  private itemStart = 0;
  private inFlight = false;
  private wantedDial: number | null = null;
  private pendingRating: (() => Promise<void>) | null = null;
  fetchCount = 0; // in-flight accounting, observable by tests

  constructor(transport: Transport, opts: ControllerOptions) {
    this.transport = transport;
    this.opts = {
      sessionId: opts.sessionId,
      fold: opts.fold,
      now: opts.now ?? (() => Date.now()),
      onRender: opts.onRender ?? (() => {}),
      onStatus: opts.onStatus ?? (() => {}),
      retry: opts.retry ?? ((fn, ms) => setTimeout(fn, ms)),
    };
  }

  get currentItem(): ItemEntry | null {
    return this.itemIndex >= 0 ? this.items[this.itemIndex] : null;
  }

  get canSubmit(): boolean {
    return this.satisfaction !== null && !this.complete;
  }

  async start(): Promise<void> {
    this.items = await this.transport.listItems();
    if (this.items.length === 0) throw new Error("no items to audition");
    await this.selectItem(0);
  }

  async selectItem(index: number): Promise<void> {
    this.itemIndex = index;
    this.dial = STEREO_REFERENCE_DIAL;
    this.satisfaction = null;
    this.itemStart = this.opts.now();
    this.trace = [[this.dial, 0]];
    await this.requestRender(this.dial);
  }

  // Dial moves record the trace immediately; fetches are coalesced so
  // at most one is in flight and the last position wins.
  dialChanged(position: number): void {
    const dial = Math.min(Math.max(Math.round(position), DIAL_MIN), DIAL_MAX);
    if (dial === this.dial) return;
    this.dial = dial;
    this.trace.push([dial, (this.opts.now() - this.itemStart) / 1000]);
    if (this.inFlight) {
      this.wantedDial = dial;
      return;
    }
    void this.requestRender(dial);
  }

  private async requestRender(dial: number): Promise<void> {
    const item = this.currentItem;
    if (!item) return;
    this.inFlight = true;
    this.fetchCount += 1;
    try {
      const result = await this.transport.fetchRender(item.item_id, dial, this.opts.fold);
      this.inFlight = false;
      if (this.wantedDial !== null && this.wantedDial !== dial) {
        const next = this.wantedDial;
        this.wantedDial = null;
        await this.requestRender(next);
        return;
      }
      this.wantedDial = null;
      this.opts.onRender(result);
      this.opts.onStatus("");
    } catch (err) {
      this.inFlight = false;
      // keep playing the previous render; retry the latest position
      this.opts.onStatus(`render fetch failed, retrying (${String(err)})`);
      const next = this.wantedDial ?? dial;
      this.wantedDial = null;
      this.opts.retry(() => void this.requestRender(next), 500);
    }
  }

  setSatisfaction(value: number): void {
    if (value < -15 || value > 15 || !Number.isInteger(value)) {
      throw new Error("satisfaction must be an integer in -15..15");
    }
    this.satisfaction = value;
  }

  async submitRating(): Promise<void> {
    if (!this.canSubmit || !this.currentItem) {
      throw new Error("satisfaction not set");
    }
    const payload = {
      session_id: this.opts.sessionId,
      item_id: this.currentItem.item_id,
      final_dial: this.dial,
      satisfaction: this.satisfaction as number,
      trace: this.trace,
    };
    const send = async () => {
      await this.transport.postRating(payload);
      this.pendingRating = null;
      await this.advance();
    };
    try {
      await send();
    } catch (err) {
      // retained locally and retried; the UI stays on the same item
      this.pendingRating = send;
      this.opts.onStatus(`rating not delivered yet, will retry (${String(err)})`);
      this.opts.retry(() => void this.retryPending(), 1000);
    }
  }

  async retryPending(): Promise<void> {
    if (!this.pendingRating) return;
    try {
      await this.pendingRating();
      this.opts.onStatus("");
    } catch {
      this.opts.retry(() => void this.retryPending(), 1000);
    }
  }

  get hasPendingRating(): boolean {
    return this.pendingRating !== null;
  }

  private async advance(): Promise<void> {
    if (this.itemIndex + 1 < this.items.length) {
      await this.selectItem(this.itemIndex + 1);
    } else {
      this.complete = true;
    }
  }
}
