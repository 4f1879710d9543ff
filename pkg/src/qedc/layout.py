"""Hardware mapping: VF2 subgraph-monomorphism layout search, a greedy
fallback placement, detection-aware SWAP routing, and ASAP scheduling."""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

from .circuit import Circuit, Instruction, Register

PROTECTED_HOP_PENALTY = 1000


class LayoutError(Exception):
    pass


@dataclass
class CouplingGraph:
    num_nodes: int
    edges: list[tuple[int, int]]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            if not (0 <= a < self.num_nodes and 0 <= b < self.num_nodes):
                raise ValueError(f"edge ({a},{b}) outside [0,{self.num_nodes})")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        self._edge_set = seen
        self._adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for a, b in self.edges:
            self._adj[a].append(b)
            self._adj[b].append(a)
        for nbrs in self._adj:
            nbrs.sort()
        self._dist: list[list[int]] | None = None

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._edge_set

    def neighbors(self, a: int) -> list[int]:
        return self._adj[a]

    def degree(self, a: int) -> int:
        return len(self._adj[a])

    def distances(self) -> list[list[int]]:
        """All-pairs shortest-path hop counts (BFS); -1 when disconnected."""
        if self._dist is None:
            dist = []
            for src in range(self.num_nodes):
                d = [-1] * self.num_nodes
                d[src] = 0
                queue = [src]
                head = 0
                while head < len(queue):
                    u = queue[head]
                    head += 1
                    for v in self._adj[u]:
                        if d[v] < 0:
                            d[v] = d[u] + 1
                            queue.append(v)
                dist.append(d)
            self._dist = dist
        return self._dist

    @classmethod
    def all_to_all(cls, num_nodes: int) -> "CouplingGraph":
        return cls(num_nodes, [(a, b) for a in range(num_nodes) for b in range(a + 1, num_nodes)])

    def to_dict(self) -> dict:
        return {"num_qubits": self.num_nodes, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, d: dict) -> "CouplingGraph":
        return cls(int(d["num_qubits"]), [tuple(e) for e in d["edges"]])


def heavy_hex_127() -> CouplingGraph:
    """A 127-node heavy-hex lattice: seven qubit rows joined by bridge qubits,
    degree <= 3 throughout."""
    row_cols = [range(0, 14), *(range(0, 15) for _ in range(5)), range(1, 15)]
    index: dict[tuple[int, int], int] = {}
    nxt = 0
    edges: list[tuple[int, int]] = []
    for r, cols in enumerate(row_cols):
        cols = list(cols)
        for c in cols:
            index[(r, c)] = nxt
            nxt += 1
        for a, b in zip(cols, cols[1:]):
            edges.append((index[(r, a)], index[(r, b)]))
        if r > 0:
            bridge_cols = (0, 4, 8, 12) if (r - 1) % 2 == 0 else (2, 6, 10, 14)
            for c in bridge_cols:
                bridge = nxt
                nxt += 1
                edges.append((index[(r - 1, c)], bridge))
                # defer the downward edge until this row is registered
                index[("bridge", r, c)] = bridge
        # connect bridges from the previous gap down into this row
        for c in (0, 4, 8, 12, 2, 6, 10, 14):
            key = ("bridge", r, c)
            if key in index and (r, c) in index:
                edges.append((index[key], index[(r, c)]))
    return CouplingGraph(nxt, edges)


@dataclass
class Layout:
    """Injective logical -> physical map with its distance score."""

    map: list[int]
    score: int

    def to_dict(self) -> dict:
        return {"map": list(self.map), "score": self.score}

    @classmethod
    def from_dict(cls, d: dict) -> "Layout":
        return cls(list(d["map"]), int(d["score"]))


def score_layout(ig: dict[tuple[int, int], int], mapping: list[int], cg: CouplingGraph) -> int:
    dist = cg.distances()
    total = 0
    for (a, b), w in ig.items():
        d = dist[mapping[a]][mapping[b]]
        if d < 0:
            raise LayoutError("interaction spans disconnected coupling components")
        total += w * (d - 1)
    return total


def vf2_layouts(
    ig: dict[tuple[int, int], int],
    num_qubits: int,
    cg: CouplingGraph,
    limit: int = 10,
) -> list[Layout]:
    """Up to `limit` subgraph monomorphisms of the interaction graph into the
    coupling graph (every interaction edge on a coupling edge, score 0).

    Deterministic: pattern qubits are seated in descending interaction-degree
    order (ties by index) and physical candidates are tried in ascending
    index order.
    """
    if num_qubits > cg.num_nodes:
        return []
    adj: list[set[int]] = [set() for _ in range(num_qubits)]
    for a, b in ig:
        adj[a].add(b)
        adj[b].add(a)
    order = sorted(range(num_qubits), key=lambda q: (-len(adj[q]), q))
    results: list[Layout] = []
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def backtrack(pos: int) -> bool:
        if len(results) >= limit:
            return True
        if pos == num_qubits:
            mapping = [assignment[q] for q in range(num_qubits)]
            results.append(Layout(mapping, 0))
            return len(results) >= limit
        q = order[pos]
        mapped_nbrs = [assignment[p] for p in adj[q] if p in assignment]
        if mapped_nbrs:
            candidates = sorted(set(cg.neighbors(mapped_nbrs[0])) - used)
        else:
            candidates = [p for p in range(cg.num_nodes) if p not in used]
        for phys in candidates:
            if cg.degree(phys) < len(adj[q]):
                continue
            if any(not cg.has_edge(phys, m) for m in mapped_nbrs):
                continue
            assignment[q] = phys
            used.add(phys)
            if backtrack(pos + 1):
                del assignment[q]
                used.discard(phys)
                return True
            del assignment[q]
            used.discard(phys)
        return False

    backtrack(0)
    return results


def fallback_layout(ig: dict[tuple[int, int], int], num_qubits: int, cg: CouplingGraph) -> Layout:
    """Greedy placement by descending interaction degree, each qubit seated on
    the physical node minimizing incremental score."""
    if num_qubits > cg.num_nodes:
        raise LayoutError(f"{num_qubits} qubits exceed {cg.num_nodes} physical qubits")
    wdeg = [0] * num_qubits
    adj: dict[int, dict[int, int]] = {q: {} for q in range(num_qubits)}
    for (a, b), w in ig.items():
        wdeg[a] += w
        wdeg[b] += w
        adj[a][b] = w
        adj[b][a] = w
    order = sorted(range(num_qubits), key=lambda q: (-wdeg[q], q))
    dist = cg.distances()
    mapping: dict[int, int] = {}
    used: set[int] = set()
    for q in order:
        best_phys, best_cost = None, None
        for phys in range(cg.num_nodes):
            if phys in used:
                continue
            cost = 0
            feasible = True
            for nbr, w in adj[q].items():
                if nbr in mapping:
                    d = dist[phys][mapping[nbr]]
                    if d < 0:
                        feasible = False
                        break
                    cost += w * (d - 1)
            if not feasible:
                continue
            if best_cost is None or cost < best_cost:
                best_phys, best_cost = phys, cost
        if best_phys is None:
            raise LayoutError("no feasible physical qubit (disconnected coupling graph)")
        mapping[q] = best_phys
        used.add(best_phys)
    full = [mapping[q] for q in range(num_qubits)]
    return Layout(full, score_layout(ig, full, cg))


# -- routing ------------------------------------------------------------------

@dataclass
class RoutingResult:
    circuit: Circuit
    initial_layout: list[int]       # logical -> physical at circuit start
    final_layout: list[int]         # logical -> physical after all SWAPs
    swap_count: int


def _protected_path(
    cg: CouplingGraph,
    src: int,
    dst: int,
    protected_phys: set[int],
) -> list[int]:
    """Cheapest src->dst path; hops landing on a protected qubit cost extra."""
    INF = float("inf")
    best = [INF] * cg.num_nodes
    best[src] = 0
    heap = [(0, src, [src])]
    while heap:
        cost, node, path = heapq.heappop(heap)
        if node == dst:
            return path
        if cost > best[node]:
            continue
        for nbr in cg.neighbors(node):
            step = 1
            if nbr != dst and nbr in protected_phys:
                step += PROTECTED_HOP_PENALTY
            nc = cost + step
            if nc < best[nbr]:
                best[nbr] = nc
                heapq.heappush(heap, (nc, nbr, path + [nbr]))
    raise LayoutError(f"no path between physical qubits {src} and {dst}")


def route(
    circ: Circuit,
    layout: Layout,
    cg: CouplingGraph,
    protected: set[int] | None = None,
) -> RoutingResult:
    """Map onto the coupling graph, inserting SWAPs along shortest paths.

    `protected` holds logical qubit indices (detection ancillas); paths are
    penalized for passing over them so SWAPs bypass detection qubits whenever
    any alternative exists.  The output circuit acts on physical indices; the
    returned layouts relate logical to physical qubits before and after.
    """
    protected = set(protected or ())
    n_log = circ.num_qubits
    if len(layout.map) < n_log:
        raise LayoutError("layout does not cover all circuit qubits")
    phi = list(layout.map)  # logical -> physical
    out = Circuit([Register("q", cg.num_nodes, 0)], list(circ.cregs), [])
    swaps = 0

    def protected_phys() -> set[int]:
        return {phi[q] for q in protected}

    for inst in circ.instructions:
        if len(inst.qubits) == 2 and inst.name != "barrier":
            a, b = inst.qubits
            pa, pb = phi[a], phi[b]
            if not cg.has_edge(pa, pb):
                path = _protected_path(cg, pa, pb, protected_phys())
                # walk qubit at pa along the path until adjacent to pb
                rev = {p: q for q, p in enumerate(phi)}
                for u, v in zip(path, path[1:-1]):
                    out.append("swap", (u, v))
                    swaps += 1
                    qu, qv = rev.get(u), rev.get(v)
                    if qu is not None:
                        phi[qu] = v
                        rev[v] = qu
                    else:
                        rev.pop(v, None)
                    if qv is not None:
                        phi[qv] = u
                        rev[u] = qv
                    else:
                        rev.pop(u, None)
                pa, pb = phi[a], phi[b]
                if not cg.has_edge(pa, pb):
                    raise LayoutError("routing failed to make the gate local")
            out.instructions.append(Instruction(inst.gate, (pa, pb), inst.clbits))
        else:
            out.instructions.append(
                Instruction(inst.gate, tuple(phi[q] for q in inst.qubits), inst.clbits)
            )
    return RoutingResult(out, list(layout.map), phi, swaps)


# -- scheduling ---------------------------------------------------------------

@dataclass
class Schedule:
    steps: list[int]
    depth: int
    idle_steps: dict[int, int]


def schedule(circ: Circuit) -> Schedule:
    """ASAP list schedule: each instruction at the earliest step after its
    qubit/clbit predecessors; also reports per-qubit idle steps."""
    q_free: dict[int, int] = {}
    c_free: dict[int, int] = {}
    steps: list[int] = []
    busy: dict[int, int] = {}
    for inst in circ.instructions:
        start = 0
        for q in inst.qubits:
            start = max(start, q_free.get(q, 0))
        for c in inst.clbits:
            start = max(start, c_free.get(c, 0))
        steps.append(start)
        for q in inst.qubits:
            q_free[q] = start + 1
            busy[q] = busy.get(q, 0) + 1
        for c in inst.clbits:
            c_free[c] = start + 1
    depth = max((s + 1 for s in steps), default=0)
    idle = {q: depth - busy.get(q, 0) for q in q_free}
    return Schedule(steps, depth, idle)


def load_coupling(path: str) -> CouplingGraph:
    with open(path) as fh:
        return CouplingGraph.from_dict(json.load(fh))
