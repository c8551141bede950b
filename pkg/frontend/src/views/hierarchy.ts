/**
 * Hierarchy editor canvas: renders the server-computed layered layout
 * (the client never lays out the DAG itself), with red conflict edges,
 * dashed strokes for other users' assertions, black fill for new terms,
 * and click interactions for drawing/removing edges.
 */

import { HierarchyPayload, LayoutPayload } from "../api.js";
import { VNode, h } from "../vdom.js";

export interface HierarchyActions {
  addEdge(parent: string, child: string): void;
  removeEdge(parent: string, child: string): void;
  pickNode(nodeId: string): void;
}

export interface HierarchyViewProps {
  layout: LayoutPayload;
  hierarchy: HierarchyPayload;
  currentUser: string;
  pendingParent: string | null; // first endpoint of an edge being drawn
  visibleNodes: string[] | null; // selection-restricted subgraph, null = all
  scaleX: number;
  scaleY: number;
}

function edgePath(
  layout: LayoutPayload,
  parent: string,
  child: string,
  scaleX: number,
  scaleY: number,
): string {
  const chain = layout.dummy_chains[`${parent}->${child}`] ?? [];
  const ids = [parent, ...chain, child];
  return ids
    .map((id) => {
      const [x, y] = layout.coords[id] ?? [0, 0];
      return `${x * scaleX},${y * scaleY}`;
    })
    .join(" ");
}

export function hierarchyEditorView(props: HierarchyViewProps, actions: HierarchyActions): VNode {
  const isNew = new Map(props.hierarchy.nodes.map((n) => [n.id, n.is_new]));
  const backEdges = new Set(props.hierarchy.back_edges.map(([u, v]) => `${u}->${v}`));
  const visible = props.visibleNodes ? new Set(props.visibleNodes) : null;

  const edges = props.layout.edges
    .filter((e) => !visible || (visible.has(e.parent) && visible.has(e.child)))
    .map((edge) => {
      const key = `${edge.parent}->${edge.child}`;
      const conflict = backEdges.has(key);
      const foreign = edge.user !== props.currentUser;
      const classes = ["h-edge"];
      if (conflict) classes.push("conflict");
      if (foreign) classes.push("other-user");
      return h(
        "polyline",
        {
          class: classes.join(" "),
          points: edgePath(props.layout, edge.parent, edge.child, props.scaleX, props.scaleY),
          fill: "none",
          stroke: conflict ? "#d62728" : "#555",
          ...(foreign ? { "stroke-dasharray": "6 4" } : {}),
          "data-parent": edge.parent,
          "data-child": edge.child,
          "data-user": edge.user,
        },
        [],
        { click: () => actions.removeEdge(edge.parent, edge.child) },
      );
    });

  const nodes = Object.entries(props.layout.layers)
    .filter(([id]) => !visible || visible.has(id))
    .map(([id]) => {
      const [x, y] = props.layout.coords[id] ?? [0, 0];
      const brandNew = isNew.get(id) ?? false;
      const pending = props.pendingParent === id;
      return h(
        "g",
        {
          class: pending ? "h-node pending" : brandNew ? "h-node new-node" : "h-node",
          transform: `translate(${x * props.scaleX},${y * props.scaleY})`,
          "data-node": id,
          "data-layer": props.layout.layers[id],
        },
        [
          h("circle", { r: 10, fill: brandNew ? "#111111" : "#f4f1ea", stroke: pending ? "steelblue" : "#333" }),
          h("text", { y: -14, "text-anchor": "middle", fill: brandNew ? "#111111" : "#333" }, [id]),
        ],
        {
          click: () => {
            if (props.pendingParent && props.pendingParent !== id) {
              actions.addEdge(props.pendingParent, id);
            } else {
              actions.pickNode(id);
            }
          },
        },
      );
    });

  return h("div", { class: "hierarchy-editor", "data-version": props.layout.version }, [
    h("svg", { class: "hierarchy-canvas", width: 1200, height: 700 }, [
      h("g", { class: "h-edges" }, edges),
      h("g", { class: "h-nodes" }, nodes),
    ]),
  ]);
}
