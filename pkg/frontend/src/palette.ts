// Contrasting colors: streams draw from a cool palette, event types from a
// warm one, so the two families never collide. Past 12 entries the palette
// cycles with a lightness shift.

export const STREAM_PALETTE: readonly string[] = [
  "#1f77b4", // blue
  "#2ca02c", // green
  "#17becf", // cyan
  "#9467bd", // purple
  "#155e8a", // deep blue
  "#59a14f", // leaf
  "#4e79a7", // steel
  "#76b7b2", // teal
  "#6a51a3", // violet
  "#10716d", // pine
  "#86bcb6", // mist
  "#3d8c40", // moss
];

export const EVENT_PALETTE: readonly string[] = [
  "#d62728", // red
  "#ff7f0e", // orange
  "#e377c2", // pink
  "#bcbd22", // olive
  "#8c564b", // brown
  "#e45756", // coral
  "#f28e2b", // amber
  "#b07aa1", // mauve
  "#9c755f", // tan
  "#e15759", // brick
  "#ffbf50", // gold
  "#c94f7c", // raspberry
];

function clamp01(x: number): number {
  return Math.min(1, Math.max(0, x));
}

export function hexToRgb(hex: string): [number, number, number] {
  const v = parseInt(hex.slice(1), 16);
  return [(v >> 16) & 0xff, (v >> 8) & 0xff, v & 0xff];
}

function rgbToHex(r: number, g: number, b: number): string {
  const part = (x: number) => Math.round(clamp01(x / 255) * 255).toString(16).padStart(2, "0");
  return `#${part(r)}${part(g)}${part(b)}`;
}

/** Shift lightness by blending toward white (amount > 0) or black (< 0). */
export function shiftLightness(hex: string, amount: number): string {
  const [r, g, b] = hexToRgb(hex);
  const target = amount > 0 ? 255 : 0;
  const f = Math.abs(amount);
  return rgbToHex(
    r + (target - r) * f,
    g + (target - g) * f,
    b + (target - b) * f,
  );
}

function cycled(palette: readonly string[], index: number): string {
  const base = palette[index % palette.length];
  const wrap = Math.floor(index / palette.length);
  if (wrap === 0) return base;
  // alternate lighter/darker each time the palette wraps
  const amount = (wrap % 2 === 1 ? 0.3 : -0.3) * Math.min(1, Math.ceil(wrap / 2) * 0.8);
  return shiftLightness(base, amount);
}

export function streamColor(index: number): string {
  return cycled(STREAM_PALETTE, index);
}

/** Stable label -> color assignment in first-seen order. */
export class EventColorMap {
  private order = new Map<string, number>();

  color(label: string): string {
    let index = this.order.get(label);
    if (index === undefined) {
      index = this.order.size;
      this.order.set(label, index);
    }
    return cycled(EVENT_PALETTE, index);
  }

  labels(): string[] {
    return [...this.order.keys()];
  }
}
