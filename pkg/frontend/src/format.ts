// Display rounding only: bounds print at 2 decimals and sensitivity
// parameters at 4, with full precision available on hover.

export function displayRound(value: number, decimals: number): string {
  if (!Number.isFinite(value)) {
    return String(value);
  }
  return value.toFixed(decimals);
}

export function boundDisplay(value: number): string {
  return displayRound(value, 2);
}

export function paramDisplay(value: number): string {
  return displayRound(value, 4);
}

export function fullPrecision(value: number): string {
  return String(value);
}

export function percentDisplay(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

export function badgeClassFor(verdict: string): string {
  const suffix = {
    sharp: "badge-sharp",
    inconclusive: "badge-inconclusive",
    not_sharp: "badge-notsharp",
  }[verdict];
  return suffix ? `badge ${suffix}` : "badge";
}
