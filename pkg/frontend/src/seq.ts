/**
 * Alert-feed sequence integrity: numbers must increase strictly and
 * without holes, otherwise the UI re-queries the full state.
 */

export type SeqVerdict = "ok" | "gap";

export class SeqTracker {
  private last: number | null = null;

  /** Feed the next received seq; "gap" demands a full resync. */
  accept(seq: number): SeqVerdict {
    if (this.last === null) {
      this.last = seq;
      return "ok";
    }
    if (seq === this.last + 1) {
      this.last = seq;
      return "ok";
    }
    this.last = Math.max(this.last, seq);
    return "gap";
  }

  /** Forget history after a resync or reconnect. */
  reset(): void {
    this.last = null;
  }

  get lastSeen(): number | null {
    return this.last;
  }
}
