"""Constructive synthesis of caching, fronthaul and delivery schedules.

The synthesized artifacts realize the closed-form NDTs exactly: packetization
counts come from lcm arithmetic, clusters and user groups are circularly
contiguous index windows, and delivery is a deterministic round-robin.  All
indices (edge nodes, users, files, parts, pieces) are 1-based to match the
natural set notation of the delivery model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from .model import (
    InfeasibleConfigError,
    NdtBreakdown,
    Regime,
    SystemConfig,
    max_multiplicity,
    serial_multiplicity,
    served_users,
)


class PacketId(NamedTuple):
    """One packet: (file, part, piece), all 1-based."""

    file: int
    part: int
    piece: int


def _wrap(a: int, b: int) -> int:
    """Circular 1-based index: maps a to 1 + ((a - 1) mod b)."""
    return 1 + (a - 1) % b


def en_clusters(k_t: int, m: int, count: int) -> tuple[tuple[int, ...], ...]:
    """``count`` clusters of ``m`` circularly contiguous edge nodes."""
    return tuple(
        tuple(_wrap((i - 1) * m + j, k_t) for j in range(1, m + 1))
        for i in range(1, count + 1)
    )


def user_groups(k_r: int, u: int, count: int) -> tuple[tuple[int, ...], ...]:
    """``count`` groups of ``u`` circularly contiguous users."""
    return tuple(
        tuple(_wrap((j - 1) * u + k, k_r) for k in range(1, u + 1))
        for j in range(1, count + 1)
    )


@dataclass(frozen=True)
class PlacementPlan:
    """Packetization counts plus per-EN cache contents."""

    cfg: SystemConfig
    m: int
    cached_m: int           # multiplicity supported by caches, min(floor(mu k_t), m)
    edge_only: bool         # cached_m == m: no fronthaul needed
    f_c: int                # parts per file
    f_d: int                # pieces per part needed for user grouping
    f_s: int                # pieces per part actually used (= f_d when edge-only)
    f_total: int            # packets per file, f_c * f_s
    b_d: int                # user groups per cluster pass
    cached_pieces_per_part: int
    clusters: tuple[tuple[int, ...], ...]
    cache_sets: Mapping[int, frozenset[PacketId]]


def build_placement(cfg: SystemConfig, m: int | None = None) -> PlacementPlan:
    """Cache placement realizing multiplicity ``m`` (default: the serial choice).

    Pieces 1..c of every part are the cached ones (a deterministic prefix, so
    plans are reproducible and diffable); the remainder travels on the
    fronthaul during delivery.
    """
    if m is None:
        m = serial_multiplicity(cfg)
    if not 1 <= m <= max_multiplicity(cfg):
        raise ValueError(f"multiplicity {m} outside [1, {max_multiplicity(cfg)}]")
    cached_m = min(math.floor(cfg.mu_kt), m)
    edge_only = cached_m == m
    if not edge_only and cfg.r == 0:
        raise InfeasibleConfigError(
            f"multiplicity {m} needs fronthaul transfer but r = 0"
        )
    u = served_users(m, cfg)
    f_c = math.lcm(m, cfg.k_t) // m
    f_d = math.lcm(u, cfg.k_r) // cfg.k_r
    b_d = math.lcm(u, cfg.k_r) // u
    f_s = f_d if edge_only else math.lcm(f_d, m)
    f_total = f_c * f_s
    cached_pieces = f_s * cached_m // m
    clusters = en_clusters(cfg.k_t, m, f_c)

    cache_sets: dict[int, frozenset[PacketId]] = {}
    parts_of: dict[int, list[int]] = {i: [] for i in range(1, cfg.k_t + 1)}
    for part, members in enumerate(clusters, start=1):
        for en in members:
            parts_of[en].append(part)
    for en in range(1, cfg.k_t + 1):
        cache_sets[en] = frozenset(
            PacketId(n, part, piece)
            for part in parts_of[en]
            for n in range(1, cfg.n_files + 1)
            for piece in range(1, cached_pieces + 1)
        )
    return PlacementPlan(
        cfg=cfg, m=m, cached_m=cached_m, edge_only=edge_only,
        f_c=f_c, f_d=f_d, f_s=f_s, f_total=f_total, b_d=b_d,
        cached_pieces_per_part=cached_pieces,
        clusters=clusters, cache_sets=cache_sets,
    )


@dataclass(frozen=True)
class FronthaulPlan:
    """Per-EN packets shipped from the cloud for one demand vector."""

    demand: tuple[int, ...]
    packet_sets: Mapping[int, frozenset[PacketId]]


def check_demand(cfg: SystemConfig, demand: Sequence[int]) -> tuple[int, ...]:
    d = tuple(demand)
    if len(d) != cfg.k_r:
        raise ValueError(f"demand must list {cfg.k_r} files, got {len(d)}")
    if len(set(d)) != len(d):
        raise ValueError("demand entries must be distinct (worst-case requests)")
    if any(not 1 <= n <= cfg.n_files for n in d):
        raise ValueError("demand entries must lie in [1, n_files]")
    return d


def build_fronthaul(plan: PlacementPlan, demand: Sequence[int]) -> FronthaulPlan:
    """Ship every uncached piece of every demanded part to its part's cluster."""
    cfg = plan.cfg
    d = check_demand(cfg, demand)
    packet_sets: dict[int, frozenset[PacketId]] = {
        en: frozenset() for en in range(1, cfg.k_t + 1)
    }
    if not plan.edge_only:
        sets: dict[int, set[PacketId]] = {en: set() for en in range(1, cfg.k_t + 1)}
        for part, members in enumerate(plan.clusters, start=1):
            for n in d:
                for piece in range(plan.cached_pieces_per_part + 1, plan.f_s + 1):
                    pkt = PacketId(n, part, piece)
                    for en in members:
                        sets[en].add(pkt)
        packet_sets = {en: frozenset(s) for en, s in sets.items()}
    return FronthaulPlan(demand=d, packet_sets=packet_sets)


@dataclass(frozen=True)
class Block:
    """One wireless transmission block: a cluster serves one user group."""

    serving_cluster: tuple[int, ...]
    user_group: tuple[int, ...]
    assignments: Mapping[int, PacketId]  # user -> packet of that user's file


@dataclass(frozen=True)
class DeliverySchedule:
    cfg: SystemConfig
    m: int
    blocks: tuple[Block, ...]

    @property
    def b_count(self) -> int:
        return len(self.blocks)


def build_schedule(plan: PlacementPlan, fronthaul: FronthaulPlan) -> DeliverySchedule:
    """Round-robin delivery: clusters in index order, passes outer, groups inner.

    Every user receives the pieces of each part in index order, one per block
    in which its group is served, so each packet is delivered exactly once.
    """
    cfg = plan.cfg
    u = served_users(plan.m, cfg)
    groups = user_groups(cfg.k_r, u, plan.b_d)
    passes = plan.f_s // plan.f_d
    blocks: list[Block] = []
    for part, members in enumerate(plan.clusters, start=1):
        next_piece = {k: 1 for k in range(1, cfg.k_r + 1)}
        for _ in range(passes):
            for group in groups:
                assignments = {}
                for k in group:
                    assignments[k] = PacketId(fronthaul.demand[k - 1], part, next_piece[k])
                    next_piece[k] += 1
                blocks.append(Block(members, group, assignments))
    return DeliverySchedule(cfg=cfg, m=plan.m, blocks=tuple(blocks))


def synthesize(cfg: SystemConfig, demand: Sequence[int] | None = None,
               m: int | None = None) -> tuple[PlacementPlan, FronthaulPlan, DeliverySchedule]:
    """Placement, fronthaul and schedule for one demand (default 1..k_r)."""
    if demand is None:
        demand = range(1, cfg.k_r + 1)
    plan = build_placement(cfg, m)
    fronthaul = build_fronthaul(plan, demand)
    schedule = build_schedule(plan, fronthaul)
    return plan, fronthaul, schedule


def measure_ndt(plan: PlacementPlan, fronthaul: FronthaulPlan,
                schedule: DeliverySchedule) -> NdtBreakdown:
    """Exact NDT of the synthesized artifacts, from first principles.

    Agrees exactly with the closed-form phase NDTs for the same multiplicity;
    the analytic and constructive paths are cross-checked in the test suite.
    """
    cfg = plan.cfg
    max_load = max(len(s) for s in fronthaul.packet_sets.values())
    if max_load == 0:
        delta_f = Fraction(0)
        regime = Regime.EDGE_ONLY
    else:
        if cfg.r == 0:
            raise InfeasibleConfigError("nonempty fronthaul plan with r = 0")
        delta_f = Fraction(max_load) / (plan.f_total * cfg.r)
        regime = Regime.CLOUD_AND_EDGE
    delta_e = Fraction(schedule.b_count, plan.f_total)
    return NdtBreakdown.serial(delta_f, delta_e, regime, plan.m)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _holder_index(plan: PlacementPlan, fronthaul: FronthaulPlan) -> dict[PacketId, set[int]]:
    holders: dict[PacketId, set[int]] = {}
    for en in range(1, plan.cfg.k_t + 1):
        for pkt in plan.cache_sets[en]:
            holders.setdefault(pkt, set()).add(en)
        for pkt in fronthaul.packet_sets[en]:
            holders.setdefault(pkt, set()).add(en)
    return holders


def validate(plan: PlacementPlan, fronthaul: FronthaulPlan,
             schedule: DeliverySchedule) -> list[str]:
    """Check every structural invariant; returns a list of violations (empty = ok)."""
    cfg = plan.cfg
    v: list[str] = []
    u = served_users(plan.m, cfg)

    # packetization counts
    if plan.f_c != math.lcm(plan.m, cfg.k_t) // plan.m:
        v.append(f"f_c = {plan.f_c} mismatches lcm(m, k_t)/m")
    if plan.f_d != math.lcm(u, cfg.k_r) // cfg.k_r:
        v.append(f"f_d = {plan.f_d} mismatches lcm(u, k_r)/k_r")
    if plan.b_d != math.lcm(u, cfg.k_r) // u:
        v.append(f"b_d = {plan.b_d} mismatches lcm(u, k_r)/u")
    expected_f_s = plan.f_d if plan.edge_only else math.lcm(plan.f_d, plan.m)
    if plan.f_s != expected_f_s:
        v.append(f"f_s = {plan.f_s} mismatches expected {expected_f_s}")
    if plan.f_total != plan.f_c * plan.f_s:
        v.append("f_total != f_c * f_s")
    if plan.f_total > cfg.k_t * cfg.k_r * plan.m:
        v.append("packetization exceeds k_t * k_r * m")
    if plan.edge_only and plan.f_total > cfg.k_t * cfg.k_r:
        v.append("edge-only packetization exceeds k_t * k_r")

    # clusters
    if plan.clusters != en_clusters(cfg.k_t, plan.m, plan.f_c):
        v.append("clusters are not the circular contiguous windows")
    for i, members in enumerate(plan.clusters, start=1):
        if len(set(members)) != plan.m:
            v.append(f"cluster {i} does not have {plan.m} distinct edge nodes")

    # cache contents
    per_en_per_file = (plan.f_c * plan.m // cfg.k_t) * plan.cached_pieces_per_part
    for en in range(1, cfg.k_t + 1):
        counts: dict[int, int] = {}
        for pkt in plan.cache_sets[en]:
            counts[pkt.file] = counts.get(pkt.file, 0) + 1
            if not (1 <= pkt.file <= cfg.n_files and 1 <= pkt.part <= plan.f_c
                    and 1 <= pkt.piece <= plan.f_s):
                v.append(f"EN {en} caches out-of-range packet {pkt}")
        for n in range(1, cfg.n_files + 1):
            c = counts.get(n, 0)
            if c != per_en_per_file:
                v.append(f"EN {en} caches {c} packets of file {n}, expected {per_en_per_file}")
            if Fraction(c, plan.f_total) > cfg.mu:
                v.append(f"EN {en} exceeds cache capacity on file {n}")

    # cached pieces live at exactly their part's cluster
    for part, members in enumerate(plan.clusters, start=1):
        expected = set(members)
        for piece in range(1, plan.cached_pieces_per_part + 1):
            pkt = PacketId(1, part, piece)
            holders = {en for en in range(1, cfg.k_t + 1) if pkt in plan.cache_sets[en]}
            if holders != expected:
                v.append(f"cached packet {pkt} held by {sorted(holders)}, expected {sorted(expected)}")

    # fronthaul
    try:
        check_demand(cfg, fronthaul.demand)
    except ValueError as e:
        v.append(f"demand invalid: {e}")
    expected_load = cfg.k_r * plan.f_total * (plan.m - plan.cached_m) // cfg.k_t
    demanded = set(fronthaul.demand)
    for en in range(1, cfg.k_t + 1):
        packets = fronthaul.packet_sets[en]
        if len(packets) != expected_load:
            v.append(f"EN {en} fronthaul load {len(packets)} != expected {expected_load}")
        for pkt in packets:
            if pkt.file not in demanded:
                v.append(f"EN {en} receives packet {pkt} of an undemanded file")
        overlap = packets & plan.cache_sets[en]
        if overlap:
            v.append(f"EN {en} fronthaul duplicates {len(overlap)} cached packets")

    # schedule
    expected_blocks = (plan.f_s // plan.f_d) * plan.b_d * plan.f_c
    if schedule.b_count != expected_blocks:
        v.append(f"block count {schedule.b_count} != expected {expected_blocks}")
    holders = _holder_index(plan, fronthaul)
    groups = set(user_groups(cfg.k_r, u, plan.b_d))
    file_of = {k: fronthaul.demand[k - 1] for k in range(1, cfg.k_r + 1)}
    received: dict[int, set[PacketId]] = {k: set() for k in range(1, cfg.k_r + 1)}
    for idx, blk in enumerate(schedule.blocks, start=1):
        if blk.user_group not in groups:
            v.append(f"block {idx} serves a group outside the defined rotation")
        if len(blk.assignments) != u:
            v.append(f"block {idx} serves {len(blk.assignments)} users, expected {u}")
        cluster = set(blk.serving_cluster)
        limit = None
        for k, pkt in blk.assignments.items():
            if k not in blk.user_group:
                v.append(f"block {idx} assigns user {k} outside its group")
            if pkt.file != file_of.get(k):
                v.append(f"block {idx} sends user {k} a packet of the wrong file")
            held_by = holders.get(pkt, set())
            if not cluster <= held_by:
                v.append(f"block {idx}: packet {pkt} unavailable at some serving EN")
            limit = len(held_by) if limit is None else min(limit, len(held_by))
            if k in received and pkt in received[k]:
                v.append(f"block {idx} re-delivers {pkt} to user {k}")
            received.setdefault(k, set()).add(pkt)
        if limit is not None and len(blk.assignments) > limit * cfg.n_t:
            v.append(
                f"block {idx} serves {len(blk.assignments)} packets, above the "
                f"zero-forcing limit {limit * cfg.n_t}"
            )
    for k in range(1, cfg.k_r + 1):
        want = {PacketId(file_of[k], part, piece)
                for part in range(1, plan.f_c + 1)
                for piece in range(1, plan.f_s + 1)}
        if received[k] != want:
            v.append(f"user {k} received {len(received[k])} packets, expected all {len(want)}")
    return v


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _packet_list(packets: frozenset[PacketId]) -> list[list[int]]:
    return [list(p) for p in sorted(packets)]


def to_json_dict(plan: PlacementPlan, fronthaul: FronthaulPlan,
                 schedule: DeliverySchedule) -> dict:
    cfg = plan.cfg
    return {
        "config": {
            "k_t": cfg.k_t, "k_r": cfg.k_r, "n_t": cfg.n_t,
            "n_files": cfg.n_files, "mu": str(cfg.mu), "r": str(cfg.r),
        },
        "placement": {
            "m": plan.m,
            "cached_multiplicity": plan.cached_m,
            "edge_only": plan.edge_only,
            "f_c": plan.f_c, "f_d": plan.f_d, "f_s": plan.f_s,
            "f_total": plan.f_total, "b_d": plan.b_d,
            "cached_pieces_per_part": plan.cached_pieces_per_part,
            "clusters": [list(c) for c in plan.clusters],
            "cache_sets": {str(en): _packet_list(s) for en, s in sorted(plan.cache_sets.items())},
        },
        "fronthaul": {
            "demand": list(fronthaul.demand),
            "packets": {str(en): _packet_list(s) for en, s in sorted(fronthaul.packet_sets.items())},
        },
        "schedule": {
            "blocks": [
                {
                    "cluster": list(b.serving_cluster),
                    "group": list(b.user_group),
                    "assignments": {str(k): list(p) for k, p in sorted(b.assignments.items())},
                }
                for b in schedule.blocks
            ],
        },
    }


def from_json_dict(doc: dict) -> tuple[PlacementPlan, FronthaulPlan, DeliverySchedule]:
    c = doc["config"]
    cfg = SystemConfig(
        k_t=int(c["k_t"]), k_r=int(c["k_r"]), n_t=int(c["n_t"]),
        n_files=int(c["n_files"]), mu=Fraction(c["mu"]), r=Fraction(c["r"]),
    )
    p = doc["placement"]
    plan = PlacementPlan(
        cfg=cfg, m=int(p["m"]), cached_m=int(p["cached_multiplicity"]),
        edge_only=bool(p["edge_only"]),
        f_c=int(p["f_c"]), f_d=int(p["f_d"]), f_s=int(p["f_s"]),
        f_total=int(p["f_total"]), b_d=int(p["b_d"]),
        cached_pieces_per_part=int(p["cached_pieces_per_part"]),
        clusters=tuple(tuple(c) for c in p["clusters"]),
        cache_sets={
            int(en): frozenset(PacketId(*pkt) for pkt in pkts)
            for en, pkts in p["cache_sets"].items()
        },
    )
    f = doc["fronthaul"]
    fronthaul = FronthaulPlan(
        demand=tuple(f["demand"]),
        packet_sets={
            int(en): frozenset(PacketId(*pkt) for pkt in pkts)
            for en, pkts in f["packets"].items()
        },
    )
    blocks = tuple(
        Block(
            serving_cluster=tuple(b["cluster"]),
            user_group=tuple(b["group"]),
            assignments={int(k): PacketId(*p) for k, p in b["assignments"].items()},
        )
        for b in doc["schedule"]["blocks"]
    )
    schedule = DeliverySchedule(cfg=cfg, m=plan.m, blocks=blocks)
    return plan, fronthaul, schedule


def save_json(path: str, plan: PlacementPlan, fronthaul: FronthaulPlan,
              schedule: DeliverySchedule) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(plan, fronthaul, schedule), fh, indent=1)


def load_json(path: str) -> tuple[PlacementPlan, FronthaulPlan, DeliverySchedule]:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


#: the four worked configurations used throughout the documentation and tests
WORKED_EXAMPLES: dict[int, SystemConfig] = {
    1: SystemConfig(k_t=4, k_r=4, n_t=2, n_files=4, mu=Fraction(1, 2), r=Fraction(0)),
    2: SystemConfig(k_t=4, k_r=8, n_t=2, n_files=8, mu=Fraction(3, 4), r=Fraction(0)),
    3: SystemConfig(k_t=4, k_r=4, n_t=2, n_files=4, mu=Fraction(0), r=Fraction(2)),
    4: SystemConfig(k_t=4, k_r=4, n_t=2, n_files=4, mu=Fraction(1, 4), r=Fraction(2)),
}
