/** DOM wiring for the operator console. */

import { ApiClient } from "./api.js";
import { draw } from "./render.js";
import { Console, canExecute } from "./state.js";
import { ViewTransform, screenToScene } from "./transform.js";

const POLL_MS = 1000;

function fmt(v: number, digits = 1): string {
  return v.toFixed(digits);
}

function start() {
  const canvas = document.getElementById("board") as HTMLCanvasElement;
  const executeBtn = document.getElementById("execute") as HTMLButtonElement;
  const overlayBox = document.getElementById("overlay") as HTMLInputElement;
  const status = document.getElementById("status") as HTMLElement;
  const metrics = document.getElementById("metrics") as HTMLElement;

  const app = new Console(new ApiClient(""));
  let transform: ViewTransform | null = null;

  app.onChange = (s) => {
    transform = draw(canvas, s);
    executeBtn.disabled = !canExecute(s);
    overlayBox.checked = s.overlayOn;
    if (!s.connected) {
      status.textContent = "service unreachable, retrying";
      status.className = "bad";
    } else if (s.error) {
      status.textContent = s.error;
      status.className = "bad";
    } else if (s.busy) {
      status.textContent = "cutting";
      status.className = "busy";
    } else if (s.plan) {
      status.textContent = "plan ready, press Execute";
      status.className = "ok";
    } else {
      status.textContent = `place two markers (${s.markers.length}/2)`;
      status.className = "";
    }
    if (s.metrics) {
      metrics.innerHTML =
        `<b>last cut</b> (run ${s.lastRunId})<br>` +
        `fat removed: ${fmt(s.metrics.fat_removed_cm2)} cm&sup2;<br>` +
        `meat removed: ${fmt(s.metrics.meat_removed_g)} g ` +
        `(${fmt(s.metrics.meat_removed_cm2)} cm&sup2;)<br>` +
        `tracking error: ${fmt(s.metrics.mean_error_m * 1000, 2)} mm, ` +
        `${s.metrics.held_steps} gate holds`;
    }
  };

  canvas.addEventListener("click", (ev) => {
    if (!transform || app.state.busy) return;
    const rect = canvas.getBoundingClientRect();
    const p = screenToScene(transform, [ev.clientX - rect.left, ev.clientY - rect.top]);
    void app.placeMarker(p);
  });
  executeBtn.addEventListener("click", () => void app.executeCut());
  overlayBox.addEventListener("change", () => app.toggleOverlay());

  void app.refreshScene();
  setInterval(() => {
    if (!app.state.busy) void app.refreshScene();
  }, POLL_MS);
}

window.addEventListener("DOMContentLoaded", start);
