"""Layered drawing of directed graphs.

Four phases over a generic (nodes, edges) graph: depth-first cycle
detection flagging back edges, minimum-total-edge-length layering by
network simplex, barycenter crossing reduction with top-down sweeps,
and horizontal coordinates from projected coordinate descent on a
separable quadratic. Every phase breaks ties lexicographically so the
result is a pure function of its input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleDetected

Edge = tuple[str, str]


@dataclass
class LayoutParams:
    min_gap: float = 1.0
    layer_gap: float = 2.0
    curvature_weight: float = 2.0  # dummy-chain straightening
    component_weight: float = 0.5  # pull between disconnected components
    ordering_sweeps: int = 4
    coord_tolerance: float = 1e-6
    coord_max_sweeps: int = 500


@dataclass
class LayoutResult:
    layers: dict[str, int] = field(default_factory=dict)
    order: list[list[str]] = field(default_factory=list)
    coords: dict[str, tuple[float, float]] = field(default_factory=dict)
    back_edges: set[Edge] = field(default_factory=set)
    dummy_chains: dict[Edge, list[str]] = field(default_factory=dict)

    def is_dummy(self, node: str) -> bool:
        return node.startswith("__dummy__")


def detect_cycles(nodes: set[str], edges: set[Edge]) -> tuple[set[Edge], set[Edge]]:
    """Split edges into (forward, back): an edge is a back edge when DFS
    reaches its head while the head is still on the stack. Roots and
    children are visited in lexicographic order."""
    children: dict[str, list[str]] = {n: [] for n in nodes}
    for u, v in sorted(edges):
        children[u].append(v)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    back: set[Edge] = set()
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        color[root] = GRAY
        while stack:
            node, child_pos = stack[-1]
            if child_pos < len(children[node]):
                stack[-1] = (node, child_pos + 1)
                child = children[node][child_pos]
                if color[child] == GRAY:
                    back.add((node, child))
                elif color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return edges - back, back


def _topological_order(nodes: list[str], edges: set[Edge]) -> list[str]:
    indegree = {n: 0 for n in nodes}
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for u, v in sorted(edges):
        indegree[v] += 1
        succ[u].append(v)
    ready = sorted(n for n in nodes if indegree[n] == 0)
    out = []
    while ready:
        node = ready.pop(0)
        out.append(node)
        for child in succ[node]:
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
        ready.sort()
    if len(out) != len(nodes):
        raise CycleDetected("edge set is not acyclic")
    return out


def _components(nodes: set[str], edges: set[Edge]) -> list[list[str]]:
    """Weakly connected components, each sorted, ordered by first node."""
    adjacent: dict[str, set[str]] = {n: set() for n in nodes}
    for u, v in edges:
        adjacent[u].add(v)
        adjacent[v].add(u)
    seen: set[str] = set()
    comps = []
    for start in sorted(nodes):
        if start in seen:
            continue
        comp = []
        frontier = [start]
        seen.add(start)
        while frontier:
            node = frontier.pop()
            comp.append(node)
            for other in adjacent[node]:
                if other not in seen:
                    seen.add(other)
                    frontier.append(other)
        comps.append(sorted(comp))
    return comps


def assign_layers(nodes: set[str], edges: set[Edge]) -> dict[str, int]:
    """Integer layers minimizing total edge length subject to
    layer(child) >= layer(parent) + 1, via network simplex per weakly
    connected component, each normalized to start at 0."""
    layers: dict[str, int] = {}
    for comp in _components(nodes, edges):
        comp_set = set(comp)
        comp_edges = {(u, v) for (u, v) in edges if u in comp_set}
        ranks = _network_simplex(comp, comp_edges)
        low = min(ranks.values())
        for n, r in ranks.items():
            layers[n] = r - low
    return layers


def _network_simplex(nodes: list[str], edges: set[Edge]) -> dict[str, int]:
    node_list = sorted(nodes)
    edge_list = sorted(edges)

    # initial feasible ranking: longest path from sources
    rank = {n: 0 for n in node_list}
    for node in _topological_order(node_list, edges):
        for u, v in edge_list:
            if u == node and rank[v] < rank[u] + 1:
                rank[v] = rank[u] + 1
    if not edge_list:
        return rank

    def slack(e: Edge) -> int:
        return rank[e[1]] - rank[e[0]] - 1

    # grow a tight spanning tree, shifting the partial tree when no
    # tight edge is incident
    tree_nodes = {node_list[0]}
    tree_edges: set[Edge] = set()
    while len(tree_nodes) < len(node_list):
        incident = [e for e in edge_list if (e[0] in tree_nodes) != (e[1] in tree_nodes)]
        tight = [e for e in incident if slack(e) == 0]
        if tight:
            e = tight[0]
            tree_edges.add(e)
            tree_nodes.add(e[0] if e[1] in tree_nodes else e[1])
        else:
            e = min(incident, key=lambda e: (slack(e), e))
            delta = slack(e) if e[0] in tree_nodes else -slack(e)
            for n in tree_nodes:
                rank[n] += delta

    def tree_adjacency() -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in node_list}
        for u, v in tree_edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def tree_side(cut_edge: Edge, adj: dict[str, list[str]]) -> set[str]:
        """Nodes on the tail side of the tree when cut_edge is removed."""
        side = {cut_edge[0]}
        frontier = [cut_edge[0]]
        while frontier:
            node = frontier.pop()
            for other in adj[node]:
                if {node, other} == {cut_edge[0], cut_edge[1]}:
                    continue
                if other not in side:
                    side.add(other)
                    frontier.append(other)
        return side

    max_pivots = 10 * len(node_list) * max(1, len(edge_list)) + 50
    for _ in range(max_pivots):
        leave = None
        tail_side: set[str] = set()
        adj = tree_adjacency()
        for e in sorted(tree_edges):
            side = tree_side(e, adj)
            cut_value = 0
            for u, v in edge_list:
                if u in side and v not in side:
                    cut_value += 1
                elif u not in side and v in side:
                    cut_value -= 1
            if cut_value < 0:
                leave, tail_side = e, side
                break
        if leave is None:
            break
        # entering edge: min-slack non-tree edge pointing head side -> tail side
        candidates = [
            e for e in edge_list
            if e not in tree_edges and e != leave and e[0] not in tail_side and e[1] in tail_side
        ]
        if not candidates:
            break
        enter = min(candidates, key=lambda e: (slack(e), e))
        shift = slack(enter)
        head_side = set(node_list) - tail_side
        for n in head_side:
            rank[n] += shift
        tree_edges.remove(leave)
        tree_edges.add(enter)
    return rank


def insert_dummies(
    layers: dict[str, int], edges: set[Edge]
) -> tuple[dict[str, int], set[Edge], dict[Edge, list[str]]]:
    """Break edges spanning more than one layer into unit segments
    through dummy nodes. Returns (augmented layers, segment edges,
    chain of dummy ids per long edge)."""
    aug_layers = dict(layers)
    segments: set[Edge] = set()
    chains: dict[Edge, list[str]] = {}
    for u, v in sorted(edges):
        span = layers[v] - layers[u]
        if span <= 1:
            segments.add((u, v))
            continue
        chain = []
        prev = u
        for i in range(1, span):
            dummy = f"__dummy__{u}__{v}__{i}"
            aug_layers[dummy] = layers[u] + i
            chain.append(dummy)
            segments.add((prev, dummy))
            prev = dummy
        segments.add((prev, v))
        chains[(u, v)] = chain
    return aug_layers, segments, chains


def initial_order(layers: dict[str, int]) -> list[list[str]]:
    """Insertion order: real nodes lexicographically, then dummies."""
    if not layers:
        return []
    n_layers = max(layers.values()) + 1
    order: list[list[str]] = [[] for _ in range(n_layers)]
    real = sorted(n for n in layers if not n.startswith("__dummy__"))
    dummies = sorted(n for n in layers if n.startswith("__dummy__"))
    for node in real + dummies:
        order[layers[node]].append(node)
    return order


def count_crossings(order: list[list[str]], segments: set[Edge], layers: dict[str, int]) -> int:
    """Explicit O(E^2) crossing count over adjacent layer pairs."""
    total = 0
    for upper_idx in range(len(order) - 1):
        upper_pos = {n: i for i, n in enumerate(order[upper_idx])}
        lower_pos = {n: i for i, n in enumerate(order[upper_idx + 1])}
        spans = [
            (upper_pos[u], lower_pos[v])
            for u, v in sorted(segments)
            if layers[u] == upper_idx and layers[v] == upper_idx + 1
        ]
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                (a1, b1), (a2, b2) = spans[i], spans[j]
                if (a1 < a2 and b1 > b2) or (a1 > a2 and b1 < b2):
                    total += 1
    return total


def order_layers(
    layers: dict[str, int], segments: set[Edge], sweeps: int = 4
) -> list[list[str]]:
    """Top-down barycenter ordering.

    Each sweep reorders every layer below the top by the mean position
    of upper neighbors (nodes without upper neighbors hold their current
    position). The best order seen, including the initial one, is
    returned, so crossings never exceed the initial count.
    """
    order = initial_order(layers)
    if not order:
        return order
    upper_neighbors: dict[str, list[str]] = {n: [] for n in layers}
    for u, v in segments:
        upper_neighbors[v].append(u)

    best = [list(layer) for layer in order]
    best_crossings = count_crossings(best, segments, layers)
    for _ in range(sweeps):
        for idx in range(1, len(order)):
            pos_above = {n: i for i, n in enumerate(order[idx - 1])}
            current = {n: i for i, n in enumerate(order[idx])}

            def barycenter(node: str) -> tuple[float, int]:
                ups = [pos_above[u] for u in upper_neighbors[node] if u in pos_above]
                if not ups:
                    return (float(current[node]), current[node])
                return (sum(ups) / len(ups), current[node])

            order[idx] = sorted(order[idx], key=barycenter)
        crossings = count_crossings(order, segments, layers)
        if crossings < best_crossings:
            best_crossings = crossings
            best = [list(layer) for layer in order]
    return best


def coordinate_objective(
    x: dict[str, float],
    edges: set[Edge],
    chains: dict[Edge, list[str]],
    components: list[list[str]],
    params: LayoutParams,
) -> float:
    """The quadratic the coordinate pass minimizes: squared horizontal
    stretch of edges, squared discrete curvature along dummy chains, and
    squared distance between component centroids."""
    q = sum((x[u] - x[v]) ** 2 for u, v in edges)
    for (u, v), chain in chains.items():
        path = [u, *chain, v]
        for p, m, n in zip(path, path[1:], path[2:]):
            q += params.curvature_weight * (x[p] - 2 * x[m] + x[n]) ** 2
    centroids = [sum(x[n] for n in comp) / len(comp) for comp in components]
    for i in range(len(centroids)):
        for j in range(i + 1, len(centroids)):
            q += params.component_weight * (centroids[i] - centroids[j]) ** 2
    return q


def assign_coordinates(
    layers: dict[str, int],
    order: list[list[str]],
    edges: set[Edge],
    segments: set[Edge],
    chains: dict[Edge, list[str]],
    params: LayoutParams,
) -> dict[str, tuple[float, float]]:
    """Projected coordinate descent on the layout quadratic.

    x starts at order-index * min_gap; each node update solves the 1-D
    quadratic exactly and clamps against its within-layer neighbors, so
    the separation constraint holds throughout and the objective never
    increases. y is layer * layer_gap. Connectivity for the component
    term follows the segment graph, which keeps dummies inside their
    edge's component.
    """
    x: dict[str, float] = {}
    for layer_nodes in order:
        for i, node in enumerate(layer_nodes):
            x[node] = i * params.min_gap

    all_nodes = set(layers)
    comps = _components(all_nodes, segments)
    comp_of: dict[str, int] = {}
    for ci, comp in enumerate(comps):
        for n in comp:
            comp_of[n] = ci

    incident_edges: dict[str, list[Edge]] = {n: [] for n in all_nodes}
    for e in edges:
        incident_edges[e[0]].append(e)
        incident_edges[e[1]].append(e)
    triples: dict[str, list[tuple[str, str, str]]] = {n: [] for n in all_nodes}
    for (u, v), chain in chains.items():
        path = [u, *chain, v]
        for p, m, n in zip(path, path[1:], path[2:]):
            for member in (p, m, n):
                triples[member].append((p, m, n))

    position_in_layer = {node: i for layer_nodes in order for i, node in enumerate(layer_nodes)}
    sweep_nodes = [node for layer_nodes in order for node in layer_nodes]

    for _ in range(params.coord_max_sweeps):
        largest_move = 0.0
        for node in sweep_nodes:
            quad = 0.0
            lin = 0.0
            for u, v in incident_edges[node]:
                other = v if u == node else u
                quad += 1.0
                lin += x[other]
            for p, m, n in triples[node]:
                w = params.curvature_weight
                if node == m:
                    quad += 4.0 * w
                    lin += 2.0 * w * (x[p] + x[n])
                else:
                    far, mid = (n, m) if node == p else (p, m)
                    quad += w
                    lin += w * (2.0 * x[mid] - x[far])
            if len(comps) > 1:
                my_comp = comps[comp_of[node]]
                size = len(my_comp)
                rest = sum(x[n] for n in my_comp) - x[node]
                for cj, comp in enumerate(comps):
                    if cj == comp_of[node]:
                        continue
                    centroid_other = sum(x[n] for n in comp) / len(comp)
                    quad += params.component_weight / (size * size)
                    lin += params.component_weight / size * (centroid_other - rest / size)
            if quad == 0.0:
                continue
            target = lin / quad

            layer_nodes = order[layers[node]]
            pos = position_in_layer[node]
            lo = x[layer_nodes[pos - 1]] + params.min_gap if pos > 0 else -float("inf")
            hi = x[layer_nodes[pos + 1]] - params.min_gap if pos + 1 < len(layer_nodes) else float("inf")
            new_x = min(max(target, lo), hi)
            largest_move = max(largest_move, abs(new_x - x[node]))
            x[node] = new_x
        if largest_move < params.coord_tolerance:
            break

    return {node: (x[node], layers[node] * params.layer_gap) for node in all_nodes}


def layered_layout(nodes: set[str], edges: set[Edge], params: LayoutParams | None = None) -> LayoutResult:
    """Run the full pipeline; back edges are excluded from layering and
    reattached flagged in the result."""
    params = params or LayoutParams()
    if not nodes:
        return LayoutResult()
    forward, back = detect_cycles(nodes, edges)
    layers = assign_layers(nodes, forward)
    aug_layers, segments, chains = insert_dummies(layers, forward)
    order = order_layers(aug_layers, segments, params.ordering_sweeps)
    coords = assign_coordinates(aug_layers, order, forward, segments, chains, params)
    return LayoutResult(
        layers=layers,
        order=order,
        coords=coords,
        back_edges=back,
        dummy_chains=chains,
    )
