/**
 * Image point cloud over a projection snapshot: per-manuscript colors
 * with toggleable convex hulls, hover thumbnails, lasso selection into
 * the annotation space, and rectangle re-projection.
 */

import { ImageRecordPayload, ProjectionSnapshot } from "../api.js";
import { Point, Rect, convexHull, pointInPolygon, rectContains } from "../geometry.js";
import { STACK_PALETTE } from "../palette.js";
import { VNode, h } from "../vdom.js";

export interface PointCloudActions {
  selectImages(ids: string[]): void;
  reprojectRect(ids: string[]): void;
  toggleHull(manuscriptId: string): void;
  hoverImage(id: string | null): void;
  openAnnotation(): void;
}

export interface PointCloudProps {
  snapshot: ProjectionSnapshot;
  imageIndex: Record<string, ImageRecordPayload>;
  selection: string[];
  hiddenHulls: string[];
  hovered: string | null;
  width: number;
  height: number;
  overplotWarnAt: number;
}

export function manuscriptColor(manuscripts: string[], manuscriptId: string): string {
  const position = manuscripts.indexOf(manuscriptId);
  return STACK_PALETTE[(position >= 0 ? position : 0) % STACK_PALETTE.length];
}

export interface ScreenPoint extends Point {
  id: string;
}

/** Scale snapshot coordinates into the viewport with a small margin. */
export function screenCoords(snapshot: ProjectionSnapshot, width: number, height: number): ScreenPoint[] {
  const entries = Object.entries(snapshot.payload.coords);
  if (entries.length === 0) return [];
  const xs = entries.map(([, [x]]) => x);
  const ys = entries.map(([, [, y]]) => y);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);
  const spanX = xHi - xLo || 1;
  const spanY = yHi - yLo || 1;
  const margin = 20;
  return entries.map(([id, [x, y]]) => ({
    id,
    x: margin + ((x - xLo) / spanX) * (width - 2 * margin),
    y: margin + ((y - yLo) / spanY) * (height - 2 * margin),
  }));
}

export function lassoImages(points: ScreenPoint[], polygon: Point[]): string[] {
  return points.filter((p) => pointInPolygon(p, polygon)).map((p) => p.id).sort();
}

export function rectImages(points: ScreenPoint[], rect: Rect): string[] {
  return points.filter((p) => rectContains(rect, p)).map((p) => p.id).sort();
}

export function overplotCount(points: ScreenPoint[]): number {
  const seen = new Map<string, number>();
  let worst = 0;
  for (const p of points) {
    const key = `${Math.round(p.x)}|${Math.round(p.y)}`;
    const count = (seen.get(key) ?? 0) + 1;
    seen.set(key, count);
    worst = Math.max(worst, count);
  }
  return worst;
}

export function pointCloudView(props: PointCloudProps, actions: PointCloudActions): VNode {
  const points = screenCoords(props.snapshot, props.width, props.height);
  const manuscripts = [
    ...new Set(points.map((p) => props.imageIndex[p.id]?.manuscript_id ?? "?")),
  ].sort();

  const hulls: VNode[] = [];
  for (const ms of manuscripts) {
    if (props.hiddenHulls.includes(ms)) continue;
    const mine = points.filter((p) => props.imageIndex[p.id]?.manuscript_id === ms);
    if (mine.length < 3) continue;
    const hull = convexHull(mine);
    hulls.push(
      h("polygon", {
        class: "hull",
        "data-manuscript": ms,
        points: hull.map((p) => `${p.x},${p.y}`).join(" "),
        fill: "none",
        stroke: manuscriptColor(manuscripts, ms),
      }),
    );
  }

  const circles = points.map((p) => {
    const selected = props.selection.includes(p.id);
    const ms = props.imageIndex[p.id]?.manuscript_id ?? "?";
    return h(
      "circle",
      {
        class: selected ? "point selected" : "point",
        cx: p.x,
        cy: p.y,
        r: selected ? 7 : 4,
        fill: manuscriptColor(manuscripts, ms),
        "data-image": p.id,
        "data-manuscript": ms,
      },
      [],
      {
        mouseenter: () => actions.hoverImage(p.id),
        mouseleave: () => actions.hoverImage(null),
        click: () => actions.selectImages([p.id]),
      },
    );
  });

  const legend = h(
    "div",
    { class: "legend" },
    manuscripts.map((ms) =>
      h(
        "span",
        {
          class: props.hiddenHulls.includes(ms) ? "legend-entry hull-off" : "legend-entry",
          style: `color:${manuscriptColor(manuscripts, ms)}`,
          "data-manuscript": ms,
        },
        [ms],
        { click: () => actions.toggleHull(ms) },
      ),
    ),
  );

  const children: Array<VNode | string> = [
    legend,
    h("svg", { class: "cloud-canvas", width: props.width, height: props.height }, [
      h("g", { class: "hulls" }, hulls),
      h("g", { class: "points" }, circles),
    ]),
    h("button", { class: "annotate" }, ["annotate selection"], {
      click: () => actions.openAnnotation(),
    }),
  ];

  if (props.hovered) {
    const record = props.imageIndex[props.hovered];
    children.push(
      h("div", { class: "tooltip image-preview", "data-image": props.hovered }, [
        record?.image_uri
          ? h("img", { src: record.image_uri, alt: props.hovered })
          : `${props.hovered} (${record?.folio ?? "?"})`,
      ]),
    );
  }
  const worst = overplotCount(points);
  if (worst > props.overplotWarnAt) {
    children.push(
      h("div", { class: "overplot-warning" }, [
        `${worst} points coincide; filter or redraw a rectangle to re-project`,
      ]),
    );
  }
  return h("div", { class: "point-cloud" }, children);
}
