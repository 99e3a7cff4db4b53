// Black is reserved for the PDP; clusters draw from a 10-color categorical
// palette keyed by cluster id, so colors are stable across re-renders.

export const PDP_COLOR = "#000000";

export const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
  "#bcbd22",
  "#17becf",
];

export function clusterColor(clusterId: number): string {
  return PALETTE[((clusterId % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

/** Cluster-size stroke width in px: 1.5 + 1.5*log10(size), clamped to [1.5, 8]. */
export function strokeWidth(size: number): number {
  const w = 1.5 + 1.5 * Math.log10(Math.max(size, 1));
  return Math.min(8, Math.max(1.5, w));
}

/** Dark/light fill pair for explanation histograms, derived from the cluster color. */
export function shadePair(color: string): { dark: string; light: string } {
  return { dark: color, light: color + "40" }; // light = 25% alpha of the same hue
}
