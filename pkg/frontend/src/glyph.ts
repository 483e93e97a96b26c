/** Feature glyph: a compact bar strip for datasets without images. */

export interface Bar {
  height: number; // 0..1
  positive: boolean;
}

/** Normalize a feature vector into symmetric bars around zero. */
export function featureBars(values: number[]): Bar[] {
  const amp = Math.max(1e-9, ...values.map((v) => Math.abs(v)));
  return values.map((v) => ({ height: Math.abs(v) / amp, positive: v >= 0 }));
}

export function renderGlyph(canvas: HTMLCanvasElement, values: number[]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const bars = featureBars(values);
  const w = canvas.width / bars.length;
  const mid = canvas.height / 2;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#e8e8ef";
  ctx.fillRect(0, mid - 0.5, canvas.width, 1);
  bars.forEach((bar, i) => {
    const h = bar.height * (mid - 2);
    ctx.fillStyle = bar.positive ? "#4a7dbd" : "#c96f4a";
    if (bar.positive) ctx.fillRect(i * w + 1, mid - h, w - 2, h);
    else ctx.fillRect(i * w + 1, mid, w - 2, h);
  });
}
