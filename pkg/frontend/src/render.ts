/** Canvas rendering: the scene raster plus overlays, all from service data. */

import { SceneDoc } from "./api.js";
import { ViewState } from "./state.js";
import { ViewTransform, fitTransform, sceneToScreen } from "./transform.js";

export function decodeScene(scene: SceneDoc): ImageData {
  const raw = atob(scene.rgb_base64);
  const out = new ImageData(scene.width, scene.height);
  for (let i = 0, j = 0; i < raw.length; i += 3, j += 4) {
    out.data[j] = raw.charCodeAt(i);
    out.data[j + 1] = raw.charCodeAt(i + 1);
    out.data[j + 2] = raw.charCodeAt(i + 2);
    out.data[j + 3] = 255;
  }
  return out;
}

function polyline(
  ctx: CanvasRenderingContext2D,
  t: ViewTransform,
  pts: [number, number][],
  color: string,
  width: number,
) {
  if (pts.length < 2) return;
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  const [x0, y0] = sceneToScreen(t, pts[0]);
  ctx.moveTo(x0, y0);
  for (const p of pts.slice(1)) {
    const [x, y] = sceneToScreen(t, p);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

export function draw(canvas: HTMLCanvasElement, state: ViewState): ViewTransform | null {
  const ctx = canvas.getContext("2d");
  if (!ctx || !state.scene) return null;
  const scene = state.scene;
  const t = fitTransform(scene.width, scene.height, canvas.width, canvas.height);

  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const img = decodeScene(scene);
  const off = document.createElement("canvas");
  off.width = scene.width;
  off.height = scene.height;
  off.getContext("2d")!.putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(
    off,
    t.offsetX,
    t.offsetY,
    scene.width * t.scale,
    scene.height * t.scale,
  );

  const [rx0, ry0, rx1, ry1] = scene.safe_region_px;
  const [sx0, sy0] = sceneToScreen(t, [rx0, ry0]);
  const [sx1, sy1] = sceneToScreen(t, [rx1, ry1]);
  ctx.strokeStyle = "#d04f4f";
  ctx.setLineDash([6, 4]);
  ctx.lineWidth = 1.5;
  ctx.strokeRect(sx0, sy0, sx1 - sx0, sy1 - sy0);
  ctx.setLineDash([]);

  if (state.overlayOn) {
    const seg = scene.segmentation;
    if (seg.meat) polyline(ctx, t, [...seg.meat.contour, seg.meat.contour[0]], "#ffd34d", 1);
    if (seg.fat) polyline(ctx, t, [...seg.fat.contour, seg.fat.contour[0]], "#7fd4ff", 1);
  }

  if (state.executed) {
    polyline(ctx, t, state.executed.pixels, "#b07ef2", 2.5);
  }
  if (state.plan) {
    polyline(ctx, t, state.plan.pixels, "#53e07e", 2);
  }

  for (const m of state.markers) {
    const [x, y] = sceneToScreen(t, m);
    ctx.fillStyle = "#c95bd6";
    ctx.beginPath();
    ctx.arc(x, y, 6, 0, 2 * Math.PI);
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
  return t;
}
