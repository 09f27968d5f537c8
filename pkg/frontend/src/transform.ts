/** Screen <-> scene-pixel coordinate mapping for the canvas view. */

export interface ViewTransform {
  scale: number; // screen pixels per scene pixel
  offsetX: number;
  offsetY: number;
}

export function fitTransform(
  sceneW: number,
  sceneH: number,
  screenW: number,
  screenH: number,
): ViewTransform {
  const scale = Math.min(screenW / sceneW, screenH / sceneH);
  return {
    scale,
    offsetX: (screenW - sceneW * scale) / 2,
    offsetY: (screenH - sceneH * scale) / 2,
  };
}

export function sceneToScreen(t: ViewTransform, p: [number, number]): [number, number] {
  return [p[0] * t.scale + t.offsetX, p[1] * t.scale + t.offsetY];
}

export function screenToScene(t: ViewTransform, p: [number, number]): [number, number] {
  return [(p[0] - t.offsetX) / t.scale, (p[1] - t.offsetY) / t.scale];
}
