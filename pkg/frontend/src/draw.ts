/**
 * Stroke capture and rendering for the drawing pad.
 *
 * StrokeBuffer is the pure model: strokes are append-only while a drag
 * is active, so the canvas can be redrawn incrementally and a finished
 * stroke never changes under the renderer.
 */

export interface StrokePoint {
  x: number;
  y: number;
  pressure: number;
}

export class StrokeBuffer {
  private readonly finished: StrokePoint[][] = [];
  private active: StrokePoint[] | null = null;

  beginStroke(): void {
    if (this.active !== null) {
      throw new Error("stroke already active");
    }
    this.active = [];
  }

  append(point: StrokePoint): void {
    if (this.active === null) {
      throw new Error("no active stroke");
    }
    this.active.push(point);
  }

  endStroke(): void {
    if (this.active === null) {
      return;
    }
    if (this.active.length > 0) {
      this.finished.push(this.active);
    }
    this.active = null;
  }

  get isDrawing(): boolean {
    return this.active !== null;
  }

  get strokes(): ReadonlyArray<ReadonlyArray<StrokePoint>> {
    return this.active === null ? this.finished : [...this.finished, this.active];
  }

  clear(): void {
    this.finished.length = 0;
    this.active = null;
  }
}

export function drawStrokes(
  ctx: CanvasRenderingContext2D,
  buffer: StrokeBuffer,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.strokeStyle = "#1a1a1a";
  for (const stroke of buffer.strokes) {
    for (let i = 1; i < stroke.length; i++) {
      ctx.beginPath();
      ctx.lineWidth = 1 + 4 * stroke[i].pressure;
      ctx.moveTo(stroke[i - 1].x, stroke[i - 1].y);
      ctx.lineTo(stroke[i].x, stroke[i].y);
      ctx.stroke();
    }
  }
}
