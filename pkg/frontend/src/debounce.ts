export interface Debounced {
  (): void;
  cancel(): void;
}

// Trailing-edge debounce: a burst of calls within `delayMs` collapses into
// one invocation after the burst settles.
export function debounce(fn: () => void, delayMs: number): Debounced {
  let timer: ReturnType<typeof setTimeout> | null = null;
  const run = () => {
    if (timer !== null) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => {
      timer = null;
      fn();
    }, delayMs);
  };
  run.cancel = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };
  return run;
}
