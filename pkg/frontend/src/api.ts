/**
 * Typed client for the annotation service JSON API.
 *
 * The Api interface is the seam tests mock; HttpApi is the fetch-backed
 * implementation the browser uses. The client performs no scoring or
 * counting of its own — every number rendered by a view originates in
 * one of these payloads.
 */

export interface GraphNode {
  manuscript_id: string;
  dataset: string;
  image_count: number;
}

export interface GraphEdge {
  u: string;
  v: string;
  value: number;
}

export interface GraphPayload {
  nodes: GraphNode[];
  edges: GraphEdge[];
  params: { metrics: string[]; max_degree: number; threshold: number };
  overlay?: { metric: string; values: Array<{ u: string; v: string; value: number | null }> };
}

export interface SelectionSummaryPayload {
  image_counts: Record<string, number>;
  decade_histogram: Record<string, number>;
  label_frequencies: Array<{ label_id: string; count: number }>;
}

export interface LabelInfo {
  id: string;
  surface: string;
  normalized: string;
  dataset_origin: string;
  category: string | null;
}

export interface FrequencyPayload {
  label_id: string;
  count_a: number;
  count_b: number;
}

export interface Recommendation {
  label_id: string;
  score: number;
  origin: string;
  explanation: {
    nearest_target?: string;
    distance?: number;
    sources?: string[];
    breakdown?: Array<{ selected: string; count: number }>;
    neighbor_images?: string[];
    min_distance?: number;
  };
}

export interface JobPayload {
  job_id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  output_snapshot_id: string | null;
  error: string | null;
}

export interface SnapshotDescriptor {
  snapshot_id: string;
  kind: string;
  version: number;
  created_at: string;
  user: string | null;
  basis: string[];
  parent_id: string | null;
}

export interface ProjectionSnapshot {
  snapshot_id: string;
  kind: string;
  version: number;
  basis: string[];
  parent_id: string | null;
  payload: { seed: number; coords: Record<string, [number, number]>; skipped: string[] };
}

export interface HierarchyEdge {
  parent: string;
  child: string;
  user: string;
  created_at: string;
}

export interface HierarchyPayload {
  version: number;
  nodes: Array<{ id: string; is_new: boolean }>;
  edges: HierarchyEdge[];
  back_edges: Array<[string, string]>;
  visible?: { nodes: string[]; edges: Array<[string, string]> };
}

export interface LayoutPayload {
  version: number;
  layers: Record<string, number>;
  order: string[][];
  coords: Record<string, [number, number]>;
  back_edges: Array<[string, string]>;
  dummy_chains: Record<string, string[]>;
  edges: HierarchyEdge[];
}

export interface HistoryEntry {
  seq: number;
  timestamp: string;
  user: string;
  change: Record<string, unknown> & { type: string };
}

export interface ImageRecordPayload {
  id: string;
  manuscript_id: string;
  dataset: string;
  folio: string;
  book: string | null;
  subject: string | null;
  description: string | null;
  label_ids: string[];
  image_uri: string | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    public detail: string,
  ) {
    super(`${status} ${code}: ${detail}`);
  }
}

export interface Api {
  corpusSummary(): Promise<Record<string, unknown>>;
  graph(params: { metrics: string[]; maxDegree: number; threshold: number; overlay?: string }): Promise<GraphPayload>;
  selectionSummary(manuscriptIds: string[]): Promise<SelectionSummaryPayload>;
  labels(): Promise<LabelInfo[]>;
  images(filter?: { ids?: string[]; manuscriptIds?: string[]; labelId?: string }): Promise<ImageRecordPayload[]>;
  labelFrequency(labelId: string): Promise<FrequencyPayload>;
  setLabel(imageId: string, labelId: string, present: boolean, user: string): Promise<{ seq: number }>;
  createLabel(surface: string, user: string): Promise<{ label: LabelInfo; seq: number }>;
  categorize(labelId: string, category: string, user: string): Promise<{ seq: number }>;
  wordSpaceRecs(selected: string[], k: number): Promise<{ recommendations: Recommendation[]; skipped_targets: string[] }>;
  cooccurrenceRecs(selected: string[], limit: number): Promise<{ recommendations: Recommendation[] }>;
  imageNeighborRecs(imageIds: string[], kImages: number, limit: number): Promise<{ recommendations: Recommendation[] }>;
  postProjection(req: { image_ids: string[]; basis: string[]; seed: number; parent_id?: string }): Promise<{ job_id: string }>;
  job(jobId: string): Promise<JobPayload>;
  projection(snapshotId: string): Promise<ProjectionSnapshot>;
  snapshots(kind?: string): Promise<SnapshotDescriptor[]>;
  hierarchy(imageIds?: string[]): Promise<HierarchyPayload>;
  hierarchyLayout(): Promise<LayoutPayload>;
  addHierarchyNode(nodeId: string, user: string): Promise<{ seq: number }>;
  addHierarchyEdge(parent: string, child: string, user: string): Promise<{ seq: number }>;
  removeHierarchyEdge(parent: string, child: string, user: string): Promise<{ seq: number }>;
  history(sinceSeq: number): Promise<HistoryEntry[]>;
  saveState(projectionId: string | null, user: string): Promise<{ snapshot_id: string }>;
}

async function parse<T>(response: Response): Promise<T> {
  const body = (await response.json()) as Record<string, unknown>;
  if (!response.ok) {
    throw new ApiError(
      response.status,
      String(body["error"] ?? "error"),
      String(body["detail"] ?? response.statusText),
    );
  }
  return body as T;
}

export class HttpApi implements Api {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    return parse<T>(await fetch(this.base + path));
  }

  private async send<T>(method: string, path: string, body?: unknown): Promise<T> {
    return parse<T>(
      await fetch(this.base + path, {
        method,
        headers: { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    );
  }

  corpusSummary() {
    return this.get<Record<string, unknown>>("/corpus/summary");
  }

  graph(params: { metrics: string[]; maxDegree: number; threshold: number; overlay?: string }) {
    const query = new URLSearchParams({
      metrics: params.metrics.join(","),
      max_degree: String(params.maxDegree),
      threshold: String(params.threshold),
    });
    if (params.overlay) query.set("overlay", params.overlay);
    return this.get<GraphPayload>(`/graph?${query}`);
  }

  selectionSummary(manuscriptIds: string[]) {
    return this.send<SelectionSummaryPayload>("POST", "/graph/selection-summary", {
      manuscript_ids: manuscriptIds,
    });
  }

  async labels() {
    const body = await this.get<{ labels: LabelInfo[] }>("/labels");
    return body.labels;
  }

  async images(filter?: { ids?: string[]; manuscriptIds?: string[]; labelId?: string }) {
    const query = new URLSearchParams();
    if (filter?.ids) query.set("ids", filter.ids.join(","));
    if (filter?.manuscriptIds) query.set("manuscript_ids", filter.manuscriptIds.join(","));
    if (filter?.labelId) query.set("label_id", filter.labelId);
    const suffix = query.toString() ? `?${query}` : "";
    const body = await this.get<{ images: ImageRecordPayload[] }>(`/images${suffix}`);
    return body.images;
  }

  labelFrequency(labelId: string) {
    return this.get<FrequencyPayload>(`/labels/${encodeURIComponent(labelId)}/frequency`);
  }

  setLabel(imageId: string, labelId: string, present: boolean, user: string) {
    return this.send<{ seq: number }>("POST", "/annotations", {
      image_id: imageId,
      label_id: labelId,
      present,
      user,
    });
  }

  createLabel(surface: string, user: string) {
    return this.send<{ label: LabelInfo; seq: number }>("POST", "/labels", { surface, user });
  }

  categorize(labelId: string, category: string, user: string) {
    return this.send<{ seq: number }>("POST", `/labels/${encodeURIComponent(labelId)}/category`, {
      category,
      user,
    });
  }

  wordSpaceRecs(selected: string[], k: number) {
    return this.send<{ recommendations: Recommendation[]; skipped_targets: string[] }>(
      "POST",
      "/recs/word-space",
      { selected, k },
    );
  }

  cooccurrenceRecs(selected: string[], limit: number) {
    return this.send<{ recommendations: Recommendation[] }>("POST", "/recs/cooccurrence", {
      selected,
      limit,
    });
  }

  imageNeighborRecs(imageIds: string[], kImages: number, limit: number) {
    return this.send<{ recommendations: Recommendation[] }>("POST", "/recs/image-neighbors", {
      image_ids: imageIds,
      k_images: kImages,
      limit,
    });
  }

  postProjection(req: { image_ids: string[]; basis: string[]; seed: number; parent_id?: string }) {
    return this.send<{ job_id: string }>("POST", "/projections", req);
  }

  job(jobId: string) {
    return this.get<JobPayload>(`/jobs/${encodeURIComponent(jobId)}`);
  }

  projection(snapshotId: string) {
    return this.get<ProjectionSnapshot>(`/projections/${encodeURIComponent(snapshotId)}`);
  }

  async snapshots(kind?: string) {
    const query = kind ? `?kind=${encodeURIComponent(kind)}` : "";
    const body = await this.get<{ snapshots: SnapshotDescriptor[] }>(`/snapshots${query}`);
    return body.snapshots;
  }

  hierarchy(imageIds?: string[]) {
    const query = imageIds && imageIds.length > 0 ? `?image_ids=${encodeURIComponent(imageIds.join(","))}` : "";
    return this.get<HierarchyPayload>(`/hierarchy${query}`);
  }

  hierarchyLayout() {
    return this.get<LayoutPayload>("/hierarchy/layout");
  }

  addHierarchyNode(nodeId: string, user: string) {
    return this.send<{ seq: number }>("POST", "/hierarchy/nodes", { node_id: nodeId, user });
  }

  addHierarchyEdge(parent: string, child: string, user: string) {
    return this.send<{ seq: number }>("POST", "/hierarchy/edges", { parent, child, user });
  }

  removeHierarchyEdge(parent: string, child: string, user: string) {
    const query = new URLSearchParams({ parent, child, user });
    return this.send<{ seq: number }>("DELETE", `/hierarchy/edges?${query}`);
  }

  async history(sinceSeq: number) {
    const body = await this.get<{ entries: HistoryEntry[] }>(`/history?since_seq=${sinceSeq}`);
    return body.entries;
  }

  saveState(projectionId: string | null, user: string) {
    return this.send<{ snapshot_id: string }>("POST", "/state/save", {
      projection_id: projectionId,
      user,
    });
  }
}
