// Typed client for the audition-service HTTP endpoints. The UI talks
// to nothing else; every byte of audio it plays comes from /render.

export type Fold = "quad" | "stereo";

export interface ItemEntry {
  item_id: string;
  title: string;
  duration_s: number;
  class_tag: string;
}

export interface RenderMetrics {
  rfrDb: number; // -Infinity for the silent-rear reference position
  loudnessLufs: number;
  normGainDb: number;
  dialIndex: number;
  fold: Fold;
}

export interface RenderResult {
  bytes: ArrayBuffer;
  metrics: RenderMetrics;
}

export interface RatingPayload {
  session_id: string;
  item_id: string;
  final_dial: number;
  satisfaction: number;
  trace: [number, number][];
}

export interface Transport {
  listItems(): Promise<ItemEntry[]>;
  fetchRender(item: string, dial: number, fold: Fold): Promise<RenderResult>;
  postRating(rating: RatingPayload): Promise<void>;
  getSummary(): Promise<unknown>;
}

function parseRfr(raw: string | null): number {
  if (raw === null) return NaN;
  return raw === "-inf" ? -Infinity : Number(raw);
}

export class HttpTransport implements Transport {
  constructor(private base: string = "") {}

  async listItems(): Promise<ItemEntry[]> {
    const res = await fetch(`${this.base}/items`);
    if (!res.ok) throw new Error(`GET /items failed: ${res.status}`);
    const body = (await res.json()) as { items: ItemEntry[] };
    return body.items;
  }

  async fetchRender(item: string, dial: number, fold: Fold): Promise<RenderResult> {
    const params = new URLSearchParams({ item, dial: String(dial), fold });
    const res = await fetch(`${this.base}/render?${params}`);
    if (!res.ok) throw new Error(`GET /render failed: ${res.status}`);
    const bytes = await res.arrayBuffer();
    return {
      bytes,
      metrics: {
        rfrDb: parseRfr(res.headers.get("X-Rfr-Db")),
        loudnessLufs: Number(res.headers.get("X-Loudness-Lufs")),
        normGainDb: Number(res.headers.get("X-Norm-Gain-Db")),
        dialIndex: Number(res.headers.get("X-Dial-Index")),
        fold: (res.headers.get("X-Fold") as Fold) ?? fold,
      },
    };
  }

  async postRating(rating: RatingPayload): Promise<void> {
    const res = await fetch(`${this.base}/rating`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(rating),
    });
    if (!res.ok) throw new Error(`POST /rating failed: ${res.status}`);
  }

  async getSummary(): Promise<unknown> {
    const res = await fetch(`${this.base}/summary`);
    if (!res.ok) throw new Error(`GET /summary failed: ${res.status}`);
    return res.json();
  }
}
