/**
 * Minimal virtual DOM.
 *
 * Views are pure functions returning VNode trees, so tests can inspect
 * every rendered value without a browser; the browser entry point turns
 * the same trees into real elements with toDom().
 */

export type EventHandler = (event?: unknown) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string | number | boolean>;
  on: Record<string, EventHandler>;
  children: Array<VNode | string>;
}

export function h(
  tag: string,
  attrs: Record<string, string | number | boolean> = {},
  children: Array<VNode | string> = [],
  on: Record<string, EventHandler> = {},
): VNode {
  return { tag, attrs, on, children };
}

/** Depth-first search over a VNode tree. */
export function findAll(root: VNode, predicate: (node: VNode) => boolean): VNode[] {
  const found: VNode[] = [];
  const stack: VNode[] = [root];
  while (stack.length > 0) {
    const node = stack.pop()!;
    if (predicate(node)) found.push(node);
    for (let i = node.children.length - 1; i >= 0; i--) {
      const child = node.children[i];
      if (typeof child !== "string") stack.push(child);
    }
  }
  return found;
}

export function byClass(root: VNode, className: string): VNode[] {
  return findAll(root, (n) => {
    const cls = n.attrs["class"];
    return typeof cls === "string" && cls.split(/\s+/).includes(className);
  });
}

/** Concatenated text content of a subtree. */
export function textOf(node: VNode | string): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}

const SVG_TAGS = new Set([
  "svg", "g", "circle", "rect", "line", "path", "polygon", "polyline", "text", "title",
]);

/** Materialize a VNode tree in a real document (browser side only). */
export function toDom(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") return doc.createTextNode(node);
  const el = SVG_TAGS.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, String(value));
  }
  for (const [event, handler] of Object.entries(node.on)) {
    el.addEventListener(event, handler as EventListener);
  }
  for (const child of node.children) {
    el.appendChild(toDom(child, doc));
  }
  return el;
}
