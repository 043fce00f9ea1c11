/** Trailing-edge debounce; slider drags settle before the API is asked. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  /** Drop the pending call, if any. */
  cancel(): void;
  /** Run the pending call now instead of waiting out the window. */
  flush(): void;
}

export const SLIDER_DEBOUNCE_MS = 100;

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number = SLIDER_DEBOUNCE_MS,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let last: A | null = null;

  const fire = () => {
    timer = null;
    if (last !== null) {
      const args = last;
      last = null;
      fn(...args);
    }
  };

  const wrapped = (...args: A) => {
    last = args;
    if (timer !== null) {
      clearTimeout(timer);
    }
    timer = setTimeout(fire, waitMs);
  };
  wrapped.cancel = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    last = null;
  };
  wrapped.flush = () => {
    if (timer !== null) {
      clearTimeout(timer);
      fire();
    }
  };
  return wrapped;
}
