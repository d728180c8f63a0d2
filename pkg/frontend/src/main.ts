// Page wiring: one store, one debouncer, repaint on every store change.

import { ApiClient } from './api.js';
import { Debouncer } from './debounce.js';
import {
  renderBanner,
  renderControls,
  renderHistory,
  renderLive,
  renderResult,
} from './render.js';
import { ExplorerStore } from './state.js';

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('api') ?? 'http://127.0.0.1:8080';

const store = new ExplorerStore(new ApiClient(baseUrl));
const debouncer = new Debouncer(200);

const $ = (id: string) => document.getElementById(id) as HTMLElement;

function onSliderInput(index: number, value: number): void {
  store.setSlider(index, value);
  debouncer.schedule(() => void store.liveEvaluate());
}

function repaint(): void {
  renderControls(store, $('controls'), onSliderInput);
  renderLive(store, $('live'));
  renderBanner(store, $('banner'));
  renderResult(store, $('result'), () => {
    store.adopt();
    debouncer.schedule(() => void store.liveEvaluate());
  });
  renderHistory(store, $('history'));

  const submit = $('submit') as HTMLButtonElement;
  submit.disabled = store.pending;
  submit.textContent = store.pending ? 'searching…' : 'find counterfactual';

  const targetWar = $('target-war') as HTMLInputElement;
  const targetPeace = $('target-peace') as HTMLInputElement;
  targetWar.checked = store.target === 'war';
  targetPeace.checked = store.target === 'peace';
}

store.subscribe(repaint);

$('submit').addEventListener('click', () => void store.submit());
$('target-war').addEventListener('change', () => store.setTarget('war'));
$('target-peace').addEventListener('change', () => store.setTarget('peace'));

store
  .load()
  .then(() => store.liveEvaluate())
  .catch((err) => {
    store.errorBanner = `server unreachable: ${err instanceof Error ? err.message : err}`;
    repaint();
  });
