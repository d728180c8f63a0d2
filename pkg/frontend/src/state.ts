// Explorer state machine: sliders, locks, live prediction, query history.
// No DOM access here; render code subscribes and repaints from snapshots.

import {
  ApiError,
  CounterfactualResult,
  ModelApi,
  ModelInfo,
} from './api.js';

export const HISTORY_LIMIT = 50;

export interface HistoryEntry {
  factual: number[];
  target: string;
  result: CounterfactualResult;
}

export type Listener = () => void;

const clamp01 = (v: number) => Math.min(1, Math.max(0, v));

export class ExplorerStore {
  info: ModelInfo | null = null;
  sliders: number[] = [];
  locks: boolean[] = [];
  target: 'war' | 'peace' = 'peace';
  liveY: number | null = null;
  liveClass: string | null = null;
  pending = false;
  lastResult: CounterfactualResult | null = null;
  history: HistoryEntry[] = [];
  errorBanner: string | null = null;
  inlineError: string | null = null;
  annealSeed = 7;

  // observability for tests and UI counters
  evaluateRequests = 0;
  private lastLiveKey: string | null = null;
  private listeners: Listener[] = [];

  constructor(private readonly api: ModelApi) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  async load(): Promise<void> {
    this.info = await this.api.model();
    this.sliders = this.info.feature_names.map(() => 0.5);
    this.locks = this.info.feature_names.map(() => false);
    this.notify();
  }

  setSlider(index: number, value: number): void {
    this.sliders[index] = clamp01(value);
    this.notify();
  }

  setSliders(values: number[]): void {
    this.sliders = values.map(clamp01);
    this.notify();
  }

  toggleLock(index: number): void {
    this.locks[index] = !this.locks[index];
    this.notify();
  }

  setTarget(target: 'war' | 'peace'): void {
    this.target = target;
    this.notify();
  }

  freeNames(): string[] {
    if (!this.info) return [];
    return this.info.feature_names.filter((_, i) => !this.locks[i]);
  }

  /** Live model readout. Re-sending a bit-identical vector is suppressed. */
  async liveEvaluate(): Promise<void> {
    const key = this.sliders.join(',');
    if (key === this.lastLiveKey && this.errorBanner === null) return;
    this.evaluateRequests += 1;
    try {
      const res = await this.api.evaluate([...this.sliders]);
      this.lastLiveKey = key;
      this.liveY = res.y;
      this.liveClass = res.class;
      this.errorBanner = null;
    } catch (err) {
      // controls stay enabled; the banner is the only change
      this.lastLiveKey = null;
      this.errorBanner = describeError(err);
    }
    this.notify();
  }

  /** One counterfactual query at a time; resolves when the answer landed. */
  async submit(): Promise<void> {
    if (this.pending || !this.info) return;
    this.pending = true;
    this.inlineError = null;
    this.notify();
    try {
      const result = await this.api.counterfactual({
        factual: [...this.sliders],
        target: this.target,
        free: this.freeNames(),
        anneal: { seed: this.annealSeed },
      });
      this.lastResult = result;
      this.history = [
        ...this.history,
        { factual: [...this.sliders], target: this.target, result },
      ].slice(-HISTORY_LIMIT);
      this.errorBanner = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.inlineError = err.message;
      } else {
        this.errorBanner = describeError(err);
      }
    } finally {
      this.pending = false;
      this.notify();
    }
  }

  /** Copy the last answer's antecedent into the sliders. */
  adopt(): void {
    if (!this.lastResult) return;
    this.setSliders([...this.lastResult.antecedent]);
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `${err.message} (status ${err.status})`;
  if (err instanceof Error) return `server unreachable: ${err.message}`;
  return 'server unreachable';
}
