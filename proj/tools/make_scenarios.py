#!/usr/bin/env python3
"""Regenerates the bundled scenarios under scenarios/.

default.json   20 routers: 4 spines with 8 channels each, 16 leaves homed on
               two spines; traffic runs between leaves sharing both spines. Candidate tables list, per (router, destination),
               next hops (neighbor, neighbor's forward channel) that lie on a
               shortest path, at most 3.
five_router.json  small diamond used for packet-by-packet mode comparisons.

Usage: tools/make_scenarios.py [output_dir]
"""

import json
import random
import sys
from collections import deque
from pathlib import Path

STANDARD = {
    "transition": [
        [0.99, 0.006, 0.004],
        [0.04, 0.94, 0.02],
        [0.02, 0.01, 0.97],
    ],
    "initial_state": 0,
    "states": [
        {"name": "good", "loss": 0.005, "loss_sd": 0.003, "bandwidth": 0.92, "bandwidth_sd": 0.04,
         "delay_ms": 4.0, "delay_sd_ms": 1.5, "jitter_ms": 2.0, "jitter_sd_ms": 1.0},
        {"name": "degraded", "loss": 0.10, "loss_sd": 0.03, "bandwidth": 0.66, "bandwidth_sd": 0.06,
         "delay_ms": 25.0, "delay_sd_ms": 8.0, "jitter_ms": 12.0, "jitter_sd_ms": 4.0},
        {"name": "bad", "loss": 0.90, "loss_sd": 0.04, "bandwidth": 0.25, "bandwidth_sd": 0.08,
         "delay_ms": 80.0, "delay_sd_ms": 20.0, "jitter_ms": 40.0, "jitter_sd_ms": 10.0},
    ],
}

# Leaf uplinks: short, rarely degraded.
ACCESS = dict(STANDARD, transition=[
    [0.995, 0.004, 0.001],
    [0.20, 0.78, 0.02],
    [0.20, 0.05, 0.75],
])

PARAMS = {
    "cognitive_interval": 5,
    "retrain_every": 10,
    "window": 200,
    "em_iters": 10,
    "tol": 1e-4,
    "hmm_states": 3,
    "thresholds": {"min_bandwidth_fraction": 0.70, "max_delay_ms": 60.0, "max_jitter_ms": 25.0,
                   "max_loss_fraction": 0.10},
    "retry_limit": 2,
    "ttl": 16,
    "max_candidates": 3,
    "data_packet_bytes": 1500,
}


def add_duplex(channels, next_index, a, b, delay, profile_ab="standard", profile_ba="standard"):
    for src, dst, profile in ((a, b, profile_ab), (b, a, profile_ba)):
        next_index[src] += 1
        channels.append({"from": src, "index": next_index[src], "to": dst, "capacity": 200,
                         "base_delay_ms": delay, "profile": profile})


def distances(routers, adj, target):
    dist = {target: 0}
    queue = deque([target])
    while queue:
        v = queue.popleft()
        for u in routers:
            if v in adj[u] and u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def candidate_tables(routers, channels, k):
    adj = {r: {} for r in routers}          # router -> {to: channel}
    by_slot = {}                             # (router, index) -> channel
    for c in channels:
        by_slot[(c["from"], c["index"])] = c
        prev = adj[c["from"]].get(c["to"])
        if prev is None or c["index"] < prev["index"]:
            adj[c["from"]][c["to"]] = c
    tables = []
    for dest in routers:
        dist = distances(routers, adj, dest)
        for r in routers:
            if r == dest or r not in dist:
                continue
            hops = []
            for x, link in adj[r].items():
                if x == dest:
                    hops.append((link["base_delay_ms"], x, 0.0, 0))
                    continue
                for (owner, m), c in by_slot.items():
                    if owner != x or c["to"] == r:
                        continue
                    if dist.get(c["to"], 1 << 30) == dist[r] - 2:
                        hops.append((link["base_delay_ms"], x, c["base_delay_ms"], m))
            if not hops:
                continue
            # Terminal hop wins outright when the destination is adjacent.
            if any(h[3] == 0 for h in hops):
                hops = [h for h in hops if h[3] == 0]
            hops.sort()
            tables.append({"router": r, "destination": dest,
                           "next_hops": [{"neighbor": x, "channel": m} for _, x, _, m in hops[:k]]})
    return tables


def default_scenario():
    rng = random.Random(20240607)
    spines = [1, 2, 3, 4]
    leaves = list(range(5, 21))
    pairs = [(1, 2)] * 4 + [(3, 4)] * 4 + [(1, 3)] * 2 + [(2, 4)] * 2 + [(1, 4)] * 2 + [(2, 3)] * 2
    channels = []
    next_index = {r: 0 for r in spines + leaves}
    homes = {}
    for leaf, pair in zip(leaves, pairs):
        homes[leaf] = pair
        for spine in pair:
            add_duplex(channels, next_index, leaf, spine, round(rng.uniform(1.0, 4.0), 1), "access")
    routers = spines + leaves
    tables = candidate_tables(routers, channels, PARAMS["max_candidates"])

    # East-west traffic between leaves homed on the same spine pair: two
    # disjoint two-hop paths per flow.
    flows = []
    for a in leaves:
        for b in leaves:
            if a != b and homes[a] == homes[b]:
                flows.append({"source": a, "destination": b, "rate": 0.25})

    return {
        "name": "default",
        "routers": routers,
        "profiles": {"standard": STANDARD, "access": ACCESS},
        "channels": channels,
        "candidates": tables,
        "traffic": {"flows": flows},
        "params": PARAMS,
    }


def five_router_scenario():
    routers = [1, 2, 3, 4, 5]
    channels = []
    next_index = {r: 0 for r in routers}
    for a, b, d in ((1, 2, 1.0), (1, 3, 2.0), (2, 4, 1.5), (3, 4, 1.0), (2, 5, 2.0), (3, 5, 1.0)):
        add_duplex(channels, next_index, a, b, d)
    tables = candidate_tables(routers, channels, PARAMS["max_candidates"])
    flows = [{"source": 1, "destination": 4, "rate": 0.8},
             {"source": 1, "destination": 5, "rate": 0.8},
             {"source": 4, "destination": 5, "rate": 0.5},
             {"source": 5, "destination": 1, "rate": 0.5}]
    return {
        "name": "five_router",
        "routers": routers,
        "profiles": {"standard": STANDARD},
        "channels": channels,
        "candidates": tables,
        "traffic": {"flows": flows},
        "params": PARAMS,
    }


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "scenarios"
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in (("default", default_scenario()), ("five_router", five_router_scenario())):
        (out / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {out / name}.json: {len(doc['channels'])} channels, {len(doc['candidates'])} tables")


if __name__ == "__main__":
    main()
