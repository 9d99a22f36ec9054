// Tiles -> drawable per-pixel columns. One tile per pixel column when the
// viewer requests buckets equal to the lane width, so the drawn extremes ARE
// the service's extremes; nothing is resampled client-side.

import type { Tile } from "./types.js";

export interface Segment {
  x: number;
  yTop: number;
  yBottom: number;
  empty: boolean;
}

/** Map a scaled value (auto-scale puts the 2-98 percentile range in [-1,1])
 * to a y pixel inside a lane, top = +limit. */
export function valueToY(value: number, laneHeight: number, limit = 1.2): number {
  const clamped = Math.max(-limit, Math.min(limit, value));
  return ((limit - clamped) / (2 * limit)) * (laneHeight - 1);
}

export function tilesToSegments(
  tiles: Tile[],
  laneHeight: number,
  useScaled = true,
  limit = 1.2,
): Segment[] {
  return tiles.map((tile) => {
    if (tile.sample_count === 0) {
      return { x: tile.bucket_index, yTop: 0, yBottom: 0, empty: true };
    }
    const hi = useScaled ? tile.scaled_max : tile.max;
    const lo = useScaled ? tile.scaled_min : tile.min;
    return {
      x: tile.bucket_index,
      yTop: valueToY(hi, laneHeight, limit),
      yBottom: valueToY(lo, laneHeight, limit),
      empty: false,
    };
  });
}

/** True when every non-empty tile is a single sample (min == max), i.e. the
 * zoom level has reached one-sample-per-bucket and the envelope degenerates
 * to the polyline through the samples. */
export function isPolyline(tiles: Tile[]): boolean {
  const occupied = tiles.filter((t) => t.sample_count > 0);
  return occupied.length > 0 && occupied.every((t) => t.min === t.max);
}
