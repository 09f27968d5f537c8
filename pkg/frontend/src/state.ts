/** View state and the operator interaction logic.
 *
 * The console never invents geometry: the plan preview and the executed
 * trajectory are stored verbatim from the service payloads and rendered as
 * received.  At most two markers exist; a third click moves the nearest one.
 * Execute is enabled only while a plan preview is present, and only one
 * execute request is ever in flight.
 */

import { ApiClient, ApiError, ExecuteDoc, PlanDoc, SceneDoc } from "./api.js";

export interface ViewState {
  scene: SceneDoc | null;
  overlayOn: boolean;
  markers: [number, number][]; // scene-pixel coordinates
  plan: PlanDoc | null;
  executed: ExecuteDoc["trajectory"] | null;
  metrics: ExecuteDoc["stats"] | null;
  lastRunId: string | null;
  error: string | null;
  busy: boolean;
  connected: boolean;
}

export function initialState(): ViewState {
  return {
    scene: null,
    overlayOn: true,
    markers: [],
    plan: null,
    executed: null,
    metrics: null,
    lastRunId: null,
    error: null,
    busy: false,
    connected: false,
  };
}

export function canExecute(s: ViewState): boolean {
  return s.plan !== null && !s.busy;
}

/** Insert or move a marker: under two markers it is added, otherwise the
 * nearest existing marker moves to the click. */
export function upsertMarker(
  markers: [number, number][],
  p: [number, number],
): [number, number][] {
  if (markers.length < 2) {
    return [...markers, p];
  }
  const d = markers.map(
    (m) => (m[0] - p[0]) * (m[0] - p[0]) + (m[1] - p[1]) * (m[1] - p[1]),
  );
  const nearest = d[0] <= d[1] ? 0 : 1;
  return markers.map((m, i) => (i === nearest ? p : m)) as [number, number][];
}

export class Console {
  state: ViewState = initialState();
  onChange: (s: ViewState) => void = () => {};

  constructor(private readonly api: ApiClient) {}

  private update(patch: Partial<ViewState>) {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async refreshScene(): Promise<void> {
    try {
      const scene = await this.api.getScene();
      this.update({ scene, connected: true });
    } catch (e) {
      this.update({ connected: false, error: describe(e) });
    }
  }

  toggleOverlay(): void {
    this.update({ overlayOn: !this.state.overlayOn });
  }

  /** Place (or move) a marker; with two markers present, push them to the
   * service and fetch the plan preview. */
  async placeMarker(p: [number, number]): Promise<void> {
    const markers = upsertMarker(this.state.markers, p);
    this.update({ markers, plan: null, error: null });
    if (markers.length === 2) {
      try {
        await this.api.postMarkers(markers);
        const plan = await this.api.getPlan();
        this.update({ plan });
      } catch (e) {
        this.update({ plan: null, error: describe(e) });
      }
    }
  }

  /** Run the planned cut; the scene refreshes so the next placement reacts
   * to the result. */
  async executeCut(): Promise<void> {
    if (!canExecute(this.state)) {
      return;
    }
    this.update({ busy: true, error: null });
    try {
      const result = await this.api.execute();
      this.update({
        busy: false,
        executed: result.trajectory,
        metrics: result.stats,
        lastRunId: result.run_id,
        scene: result.scene,
        markers: [],
        plan: null,
      });
    } catch (e) {
      this.update({ busy: false, error: describe(e) });
    }
  }
}

export function describe(e: unknown): string {
  if (e instanceof ApiError) {
    const retry =
      e.status === 409
        ? " (place two markers first)"
        : e.status === 422
          ? " (adjust the markers and retry)"
          : "";
    return `service error ${e.status}: ${e.message}${retry}`;
  }
  return e instanceof Error ? `connection lost: ${e.message}` : String(e);
}
