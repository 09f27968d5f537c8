/** Typed client for the cutsim point-to-point service. */

export interface ContourDoc {
  area: number;
  contour: [number, number][];
}

export interface SegmentationDoc {
  meat: ContourDoc | null;
  fat: ContourDoc | null;
  markers: [number, number][];
}

export interface SceneDoc {
  width: number;
  height: number;
  rgb_base64: string;
  segmentation: SegmentationDoc;
  board: { px_per_m: number; margin_px: number };
  safe_region_px: [number, number, number, number];
  executions: number;
}

export interface PlanDoc {
  robot: [number, number][];
  pixels: [number, number][];
}

export interface ExecuteDoc {
  run_id: string;
  trajectory: { robot: [number, number][]; pixels: [number, number][] };
  stats: {
    fat_removed_cm2: number;
    meat_removed_cm2: number;
    meat_removed_g: number;
    held_steps: number;
    mean_error_m: number;
  };
  scene: SceneDoc;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    const body = await resp.text();
    if (!resp.ok) {
      let reason = body;
      try {
        reason = JSON.parse(body).error ?? body;
      } catch {
        /* non-JSON error body: report it raw */
      }
      throw new ApiError(resp.status, reason);
    }
    return JSON.parse(body) as T;
  }

  getScene(): Promise<SceneDoc> {
    return this.request<SceneDoc>("/scene");
  }

  postMarkers(markers: [number, number][]): Promise<{ ok: boolean }> {
    return this.request<{ ok: boolean }>("/markers", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ markers }),
    });
  }

  getPlan(): Promise<PlanDoc> {
    return this.request<PlanDoc>("/plan");
  }

  execute(): Promise<ExecuteDoc> {
    return this.request<ExecuteDoc>("/execute", { method: "POST" });
  }
}
