/**
 * Tactile-waveform panel: min/max envelope of the drive signal with a
 * marker at every sub-pattern boundary.
 */

export interface WaveformGeometry {
  /** Per-pixel-column [min, max] amplitude envelope, in [-1, 1]. */
  envelope: Array<[number, number]>;
  /** X positions (pixel columns) of the sub-pattern boundaries. */
  boundaries: number[];
}

export function waveformGeometry(
  samples: ArrayLike<number>,
  subPatternCount: number,
  width: number,
): WaveformGeometry {
  if (width <= 0 || samples.length === 0) {
    return { envelope: [], boundaries: [] };
  }
  const perColumn = samples.length / width;
  const envelope: Array<[number, number]> = [];
  for (let column = 0; column < width; column++) {
    const start = Math.floor(column * perColumn);
    const end = Math.max(start + 1, Math.floor((column + 1) * perColumn));
    let lo = Infinity;
    let hi = -Infinity;
    for (let i = start; i < end && i < samples.length; i++) {
      lo = Math.min(lo, samples[i]);
      hi = Math.max(hi, samples[i]);
    }
    envelope.push([lo === Infinity ? 0 : lo, hi === -Infinity ? 0 : hi]);
  }
  const boundaries: number[] = [];
  for (let k = 0; k < subPatternCount; k++) {
    boundaries.push(Math.round((k * width) / subPatternCount));
  }
  return { envelope, boundaries };
}

export function drawWaveform(
  ctx: CanvasRenderingContext2D,
  geometry: WaveformGeometry,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#f4f1ea";
  ctx.fillRect(0, 0, width, height);
  const mid = height / 2;
  ctx.strokeStyle = "#2d6cdf";
  ctx.lineWidth = 1;
  ctx.beginPath();
  geometry.envelope.forEach(([lo, hi], x) => {
    ctx.moveTo(x + 0.5, mid - hi * mid * 0.9);
    ctx.lineTo(x + 0.5, mid - lo * mid * 0.9);
  });
  ctx.stroke();
  ctx.strokeStyle = "rgba(0,0,0,0.25)";
  ctx.beginPath();
  for (const x of geometry.boundaries) {
    ctx.moveTo(x + 0.5, 0);
    ctx.lineTo(x + 0.5, height);
  }
  ctx.stroke();
}
