// Looped playback with a short crossfade between renders. Two audio
// elements alternate; the incoming one ramps up over ~100 ms while the
// outgoing ramps down, so dial moves swap as gaplessly as the browser
// allows. All bytes come from /render responses.

const CROSSFADE_MS = 100;

export class CrossfadePlayer {
  private slots: HTMLAudioElement[];
  private active = 0;
  private urls: (string | null)[] = [null, null];
  playing = false;

  constructor() {
    this.slots = [new Audio(), new Audio()];
    for (const a of this.slots) {
      a.loop = true; // items loop seamlessly during adjustment
      a.preload = "auto";
    }
  }

  get position(): number {
    return this.slots[this.active].currentTime;
  }

  async swap(bytes: ArrayBuffer): Promise<void> {
    const next = 1 - this.active;
    const incoming = this.slots[next];
    const outgoing = this.slots[this.active];
    if (this.urls[next]) URL.revokeObjectURL(this.urls[next] as string);
    const url = URL.createObjectURL(new Blob([bytes], { type: "audio/wav" }));
    this.urls[next] = url;
    incoming.src = url;
    incoming.volume = 0;
    // resume at the same loop position for a seamless-as-possible swap
    const pos = outgoing.duration ? outgoing.currentTime % outgoing.duration : 0;
    await incoming.play().catch(() => {});
    try {
      incoming.currentTime = pos;
    } catch {
      // not seekable yet; start from the top
    }
    const t0 = performance.now();
    await new Promise<void>((resolve) => {
      const ramp = () => {
        const k = Math.min((performance.now() - t0) / CROSSFADE_MS, 1);
        incoming.volume = k;
        outgoing.volume = 1 - k;
        if (k < 1) requestAnimationFrame(ramp);
        else resolve();
      };
      requestAnimationFrame(ramp);
    });
    outgoing.pause();
    this.active = next;
    this.playing = true;
  }

  pause(): void {
    this.slots[this.active].pause();
    this.playing = false;
  }

  resume(): void {
    void this.slots[this.active].play();
    this.playing = true;
  }
}

// Quad output is used only when the device reports enough channels;
// otherwise the UI requests stereo fold-downs and shows a badge.
export function deviceSupportsQuad(): boolean {
  try {
    const ctx = new AudioContext();
    const ok = ctx.destination.maxChannelCount >= 4;
    void ctx.close();
    return ok;
  } catch {
    return false;
  }
}
