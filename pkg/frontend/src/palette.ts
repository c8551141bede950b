/** Color conventions shared by all views. */

// Dataset identity colors (nodes, frequency bars).
export const DATASET_COLORS: Record<string, string> = {
  A: "#c0392b", // first source database
  B: "#2980b9", // second source database
  both: "#8e6bab",
  new: "#111111", // brand-new terms render black
};

// Stacked co-occurrence bars cycle through twelve hues and then repeat.
export const STACK_PALETTE = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

export function stackColor(index: number): string {
  return STACK_PALETTE[index % STACK_PALETTE.length];
}

/** Old-vocabulary entries get a washed-out background; new terms get the
 * saturated treatment on the font instead. */
export function desaturated(hex: string): string {
  const r = parseInt(hex.slice(1, 3), 16);
  const g = parseInt(hex.slice(3, 5), 16);
  const b = parseInt(hex.slice(5, 7), 16);
  const mix = (c: number) => Math.round(c + (255 - c) * 0.6);
  return `rgb(${mix(r)}, ${mix(g)}, ${mix(b)})`;
}

export const SELECTION_COLOR = "steelblue";
