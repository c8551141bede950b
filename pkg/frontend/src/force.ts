/**
 * Deterministic force-directed placement for the manuscript graph.
 *
 * Nodes repel each other, edges pull their endpoints together with
 * strength proportional to the similarity value, and a weak centering
 * force keeps components on screen. Initial positions come from a
 * seeded generator, so a given graph always lands the same way.
 */

export interface ForceNode {
  id: string;
  weight: number; // drives radius; heavier nodes move a little less
}

export interface ForceEdge {
  u: string;
  v: string;
  value: number;
}

export interface ForceOptions {
  width: number;
  height: number;
  iterations: number;
  seed: number;
  repulsion: number;
  springLength: number;
}

export const DEFAULT_FORCE: ForceOptions = {
  width: 800,
  height: 600,
  iterations: 300,
  seed: 1,
  repulsion: 6000,
  springLength: 80,
};

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  nodes: ForceNode[],
  edges: ForceEdge[],
  options: Partial<ForceOptions> = {},
): Map<string, { x: number; y: number }> {
  const opts = { ...DEFAULT_FORCE, ...options };
  const rand = mulberry32(opts.seed);
  const xs: number[] = [];
  const ys: number[] = [];
  const index = new Map<string, number>();
  nodes.forEach((node, i) => {
    index.set(node.id, i);
    xs.push(rand() * opts.width);
    ys.push(rand() * opts.height);
  });

  const cx = opts.width / 2;
  const cy = opts.height / 2;
  for (let iter = 0; iter < opts.iterations; iter++) {
    const cooling = 1 - iter / opts.iterations;
    const fx = new Array<number>(nodes.length).fill(0);
    const fy = new Array<number>(nodes.length).fill(0);

    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          // coincident points: deterministic nudge apart
          dx = 0.01 * (i - j);
          dy = 0.01;
          d2 = dx * dx + dy * dy;
        }
        const push = opts.repulsion / d2;
        const d = Math.sqrt(d2);
        fx[i] += (dx / d) * push;
        fy[i] += (dy / d) * push;
        fx[j] -= (dx / d) * push;
        fy[j] -= (dy / d) * push;
      }
    }

    for (const edge of edges) {
      const i = index.get(edge.u);
      const j = index.get(edge.v);
      if (i === undefined || j === undefined) continue;
      const dx = xs[j] - xs[i];
      const dy = ys[j] - ys[i];
      const d = Math.sqrt(dx * dx + dy * dy) || 1e-3;
      const pull = ((d - opts.springLength) / d) * 0.05 * (0.2 + edge.value);
      fx[i] += dx * pull;
      fy[i] += dy * pull;
      fx[j] -= dx * pull;
      fy[j] -= dy * pull;
    }

    for (let i = 0; i < nodes.length; i++) {
      fx[i] += (cx - xs[i]) * 0.01;
      fy[i] += (cy - ys[i]) * 0.01;
      const damp = cooling / (1 + 0.05 * nodes[i].weight);
      xs[i] += Math.max(-20, Math.min(20, fx[i])) * damp;
      ys[i] += Math.max(-20, Math.min(20, fy[i])) * damp;
    }
  }

  const out = new Map<string, { x: number; y: number }>();
  nodes.forEach((node, i) => out.set(node.id, { x: xs[i], y: ys[i] }));
  return out;
}
