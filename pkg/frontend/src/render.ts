// DOM painting from store snapshots. All state lives in the store.

import { VariableDelta } from './api.js';
import { ExplorerStore } from './state.js';

const DIRECTION_MARK: Record<VariableDelta['direction'], string> = {
  additive: '▲',
  subtractive: '▼',
  unchanged: '•',
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(v: number): string {
  return v.toFixed(3);
}

export function renderControls(
  store: ExplorerStore,
  root: HTMLElement,
  onSliderInput: (index: number, value: number) => void,
): void {
  root.replaceChildren();
  if (!store.info) return;
  store.info.feature_names.forEach((name, i) => {
    const row = el('div', 'control-row');
    row.appendChild(el('label', 'feature-name', name));

    const slider = el('input') as HTMLInputElement;
    slider.type = 'range';
    slider.min = '0';
    slider.max = '1';
    slider.step = '0.01';
    slider.value = String(store.sliders[i]);
    slider.disabled = false; // controls stay enabled even when the server is down
    slider.addEventListener('input', () => onSliderInput(i, Number(slider.value)));
    row.appendChild(slider);

    row.appendChild(el('span', 'slider-value', fmt(store.sliders[i])));

    const lock = el('button', store.locks[i] ? 'lock locked' : 'lock');
    lock.textContent = store.locks[i] ? 'locked' : 'free';
    lock.addEventListener('click', () => store.toggleLock(i));
    row.appendChild(lock);

    root.appendChild(row);
  });
}

export function renderLive(store: ExplorerStore, root: HTMLElement): void {
  root.replaceChildren();
  if (store.liveY === null || store.liveClass === null) {
    root.appendChild(el('span', 'muted', 'move a slider to evaluate'));
    return;
  }
  root.appendChild(el('span', 'live-y', `y = ${store.liveY.toFixed(4)}`));
  root.appendChild(el('span', `badge badge-${store.liveClass}`, store.liveClass));
}

export function renderBanner(store: ExplorerStore, root: HTMLElement): void {
  root.replaceChildren();
  root.hidden = store.errorBanner === null;
  if (store.errorBanner !== null) {
    root.appendChild(el('span', 'banner-text', store.errorBanner));
  }
}

export function renderResult(
  store: ExplorerStore,
  root: HTMLElement,
  onAdopt: () => void,
): void {
  root.replaceChildren();
  if (store.inlineError !== null) {
    root.appendChild(el('p', 'inline-error', store.inlineError));
    return;
  }
  const result = store.lastResult;
  if (!result) {
    root.appendChild(el('p', 'muted', 'no query submitted yet'));
    return;
  }
  const head = el('div', 'result-head');
  head.appendChild(
    el('span', `badge badge-${result.achieved_class}`, result.achieved_class),
  );
  head.appendChild(
    el(
      'span',
      result.success ? 'success-yes' : 'success-no',
      result.success ? 'success' : 'not within margin',
    ),
  );
  head.appendChild(
    el('span', 'muted', `y = ${result.achieved_y.toFixed(4)}, error = ${result.error.toExponential(2)}`),
  );
  root.appendChild(head);

  const table = el('div', 'delta-table');
  for (const d of result.deltas) {
    const row = el('div', `delta-row delta-${d.direction}`);
    row.appendChild(el('span', 'feature-name', d.name));
    row.appendChild(bar(d.factual, 'bar-factual'));
    row.appendChild(bar(d.counterfactual, 'bar-counterfactual'));
    row.appendChild(
      el('span', 'delta-mark', `${DIRECTION_MARK[d.direction]} ${d.direction}`),
    );
    row.appendChild(
      el('span', 'delta-values', `${fmt(d.factual)} → ${fmt(d.counterfactual)}`),
    );
    table.appendChild(row);
  }
  root.appendChild(table);

  const adopt = el('button', 'adopt');
  adopt.textContent = 'adopt as new factual';
  adopt.addEventListener('click', onAdopt);
  root.appendChild(adopt);
}

function bar(value: number, className: string): HTMLElement {
  const outer = el('div', `bar ${className}`);
  const fill = el('div', 'bar-fill');
  fill.style.width = `${Math.round(value * 100)}%`;
  outer.appendChild(fill);
  return outer;
}

export function renderHistory(store: ExplorerStore, root: HTMLElement): void {
  root.replaceChildren();
  store.history.forEach((entry, i) => {
    const row = el('div', 'history-row');
    row.appendChild(el('span', 'history-index', `#${i + 1}`));
    row.appendChild(el('span', 'history-target', `target ${entry.target}`));
    row.appendChild(
      el(
        'span',
        `badge badge-${entry.result.achieved_class}`,
        entry.result.achieved_class,
      ),
    );
    row.appendChild(
      el('span', 'muted', `error ${entry.result.error.toExponential(2)}`),
    );
    root.appendChild(row);
  });
}
