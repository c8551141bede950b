/**
 * Manuscript graph: force-placed nodes colored by dataset and sized by
 * image count, edge thickness from the similarity value, optional
 * overlay strokes for a second metric, lasso selection feeding the
 * metadata drawer.
 */

import { GraphPayload, SelectionSummaryPayload } from "../api.js";
import { forceLayout } from "../force.js";
import { Point, pointInPolygon } from "../geometry.js";
import { DATASET_COLORS, SELECTION_COLOR } from "../palette.js";
import { VNode, h } from "../vdom.js";

export interface GraphActions {
  selectManuscripts(ids: string[]): void;
  setMaxDegree(maxDegree: number): void;
  toggleOverlay(metric: string | null): void;
}

export interface GraphViewProps {
  graph: GraphPayload;
  selection: string[];
  summary: SelectionSummaryPayload | null;
  width: number;
  height: number;
  seed: number;
}

export function lassoSelect(
  positions: Map<string, { x: number; y: number }>,
  polygon: Point[],
): string[] {
  const hit: string[] = [];
  for (const [id, pos] of positions) {
    if (pointInPolygon(pos, polygon)) hit.push(id);
  }
  return hit.sort();
}

function summaryDrawer(summary: SelectionSummaryPayload): VNode {
  return h("div", { class: "drawer" }, [
    h("h3", {}, ["selection"]),
    h(
      "ul",
      { class: "image-counts" },
      Object.entries(summary.image_counts).map(([ms, count]) =>
        h("li", { "data-manuscript": ms, "data-count": count }, [`${ms}: ${count}`]),
      ),
    ),
    h(
      "div",
      { class: "timeline" },
      Object.entries(summary.decade_histogram).map(([decade, count]) =>
        h("span", { class: "decade", "data-decade": decade, "data-count": count }, []),
      ),
    ),
    h(
      "div",
      { class: "label-cloud" },
      summary.label_frequencies.map((item) =>
        h("span", { class: "cloud-term", "data-label": item.label_id, "data-count": item.count }, [
          item.label_id,
        ]),
      ),
    ),
  ]);
}

export function manuscriptGraphView(props: GraphViewProps, actions: GraphActions): VNode {
  const positions = forceLayout(
    props.graph.nodes.map((n) => ({ id: n.manuscript_id, weight: n.image_count })),
    props.graph.edges,
    { width: props.width, height: props.height, seed: props.seed },
  );
  const overlayValues = new Map<string, number | null>();
  if (props.graph.overlay) {
    for (const entry of props.graph.overlay.values) {
      overlayValues.set(`${entry.u}|${entry.v}`, entry.value);
    }
  }

  const edges = props.graph.edges.flatMap((edge) => {
    const a = positions.get(edge.u)!;
    const b = positions.get(edge.v)!;
    const base = h("line", {
      class: "edge",
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      stroke: "#999",
      "stroke-width": 0.5 + 4 * edge.value,
      "data-u": edge.u,
      "data-v": edge.v,
      "data-value": edge.value,
    });
    const overlay = overlayValues.get(`${edge.u}|${edge.v}`);
    if (overlay === undefined || overlay === null) return [base];
    return [
      base,
      h("line", {
        class: "edge overlay",
        x1: a.x,
        y1: a.y,
        x2: b.x,
        y2: b.y,
        stroke: "#e67e22",
        "stroke-dasharray": "4 3",
        "stroke-width": 0.5 + 4 * overlay,
        "data-u": edge.u,
        "data-v": edge.v,
        "data-value": overlay,
      }),
    ];
  });

  const nodes = props.graph.nodes.map((node) => {
    const pos = positions.get(node.manuscript_id)!;
    const selected = props.selection.includes(node.manuscript_id);
    return h(
      "circle",
      {
        class: selected ? "node selected" : "node",
        cx: pos.x,
        cy: pos.y,
        r: (selected ? 6 : 4) + Math.sqrt(node.image_count),
        fill: selected ? SELECTION_COLOR : DATASET_COLORS[node.dataset] ?? "#444",
        "data-manuscript": node.manuscript_id,
        "data-image-count": node.image_count,
      },
      [h("title", {}, [`${node.manuscript_id} (${node.image_count} images)`])],
      { click: () => actions.selectManuscripts([node.manuscript_id]) },
    );
  });

  const children: Array<VNode | string> = [
    h("div", { class: "graph-controls" }, [
      h("label", {}, ["max edges per node"]),
      h(
        "input",
        {
          class: "max-degree",
          type: "range",
          min: 1,
          max: 20,
          value: props.graph.params.max_degree,
        },
        [],
        {
          change: (event) => {
            const target = (event as { target?: { value?: string } }).target;
            actions.setMaxDegree(Number(target?.value ?? props.graph.params.max_degree));
          },
        },
      ),
      h("button", { class: "overlay-toggle" }, ["overlay"], {
        click: () => actions.toggleOverlay(props.graph.overlay ? null : "description"),
      }),
    ]),
    h("svg", { class: "graph-canvas", width: props.width, height: props.height }, [
      h("g", { class: "edges" }, edges),
      h("g", { class: "nodes" }, nodes),
    ]),
  ];
  if (props.graph.nodes.length === 0) {
    children.push(h("div", { class: "hint" }, ["no manuscripts match the current parameters"]));
  }
  if (props.summary) children.push(summaryDrawer(props.summary));
  return h("div", { class: "manuscript-graph" }, children);
}
