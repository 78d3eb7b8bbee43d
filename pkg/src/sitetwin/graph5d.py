"""Typed knowledge graph linking cost items, activities, work packages,
measurements, and scenarios, with index-adjusted cost rollups."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownNode

NODE_TYPES = ("activity", "cost-item", "work-package", "measurement", "scenario")
RELATIONS = ("maps-to", "measured-by", "feeds", "affects")

MATERIAL = "material"
LABOR = "labor"


@dataclass(frozen=True)
class CostItem:
    id: str
    csi_division: str
    description: str
    unit_cost: float
    quantity: float
    kind: str = MATERIAL      # material | labor, selects the index multiplier
    source: str = "ledger"    # ledger | estimate

    def __post_init__(self):
        if self.unit_cost < 0 or self.quantity < 0:
            raise ValueError(f"{self.id}: unit_cost and quantity must be >= 0")

    @property
    def direct_cost(self) -> float:
        return self.unit_cost * self.quantity


@dataclass(frozen=True)
class IndexTable:
    cci_multiplier: float = 1.0
    wage_multiplier: float = 1.0
    vintage: int = 2025

    def __post_init__(self):
        if self.cci_multiplier <= 0 or self.wage_multiplier <= 0:
            raise ValueError("index multipliers must be > 0")


@dataclass
class KnowledgeGraph:
    """Single-writer graph; reads see a consistent value snapshot."""

    nodes: dict = field(default_factory=dict)   # id -> (type, payload-or-None)
    edges: set = field(default_factory=set)     # (from, to, relation)

    def register(self, node_id: str, node_type: str, payload=None):
        if node_type not in NODE_TYPES:
            raise ValueError(f"unknown node type {node_type!r}")
        self.nodes[node_id] = (node_type, payload)
        return self

    def node_type(self, node_id: str) -> str:
        self._require(node_id)
        return self.nodes[node_id][0]

    def payload(self, node_id: str):
        self._require(node_id)
        return self.nodes[node_id][1]

    def _require(self, node_id):
        if node_id not in self.nodes:
            raise UnknownNode(f"node {node_id!r} is not registered")

    def link(self, from_node: str, to_node: str, relation: str):
        """Add a typed edge; duplicate links collapse (idempotent)."""
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        self._require(from_node)
        self._require(to_node)
        self.edges.add((from_node, to_node, relation))
        return self

    def neighbors(self, node_id: str, relation: str):
        self._require(node_id)
        return sorted(t for f, t, r in self.edges if f == node_id and r == relation)

    def incoming(self, node_id: str, relation: str):
        self._require(node_id)
        return sorted(f for f, t, r in self.edges if t == node_id and r == relation)

    def rollup_cost(self, activity_id: str, index: IndexTable) -> float:
        """Index-adjusted cost of all items mapping to the activity."""
        self._require(activity_id)
        total = 0.0
        for item_id in self.incoming(activity_id, "maps-to"):
            item = self.payload(item_id)
            if not isinstance(item, CostItem):
                continue
            mult = index.cci_multiplier if item.kind == MATERIAL else index.wage_multiplier
            total += item.unit_cost * item.quantity * mult
        return total

    def trace(self, node_id: str, relation: str, depth: int):
        """All directed paths of one relation from node_id, up to ``depth`` hops.

        Paths come back lexicographically ordered, shortest prefixes first.
        """
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self._require(node_id)
        paths = []

        def walk(path):
            if len(path) - 1 >= depth:
                return
            for nxt in self.neighbors(path[-1], relation):
                if nxt in path:
                    continue  # guard against relation cycles
                new = path + [nxt]
                paths.append(tuple(new))
                walk(new)

        walk([node_id])
        return sorted(paths, key=lambda p: (len(p), p))

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        for node_id in sorted(self.nodes):
            node_type, payload = self.nodes[node_id]
            entry = {"id": node_id, "type": node_type}
            if isinstance(payload, CostItem):
                entry["cost_item"] = {
                    "id": payload.id, "csi_division": payload.csi_division,
                    "description": payload.description, "unit_cost": payload.unit_cost,
                    "quantity": payload.quantity, "kind": payload.kind,
                    "source": payload.source,
                }
            nodes.append(entry)
        return {
            "nodes": nodes,
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "KnowledgeGraph":
        graph = cls()
        for node in payload.get("nodes", ()):
            item = None
            if "cost_item" in node:
                item = CostItem(**node["cost_item"])
            graph.register(node["id"], node["type"], item)
        for f, t, r in payload.get("edges", ()):
            graph.link(f, t, r)
        return graph
