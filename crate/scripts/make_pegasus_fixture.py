"""Regenerate the Pegasus-style working-graph fixture.

Builds the P16 Pegasus graph with linear node labels and removes 204 nodes
chosen by a seeded RNG, leaving 5436 active qubits. Output uses the
topology file format: node count, node ids, `E`, then edges.
"""
import random
import sys

import dwave_networkx as dnx

TARGET_ACTIVE = 5436
SEED = 2021


def main(path):
    graph = dnx.pegasus_graph(16)
    nodes = sorted(graph.nodes())
    rng = random.Random(SEED)
    dead = set(rng.sample(nodes, len(nodes) - TARGET_ACTIVE))
    active = [v for v in nodes if v not in dead]
    edges = sorted(
        (min(u, v), max(u, v))
        for u, v in graph.edges()
        if u not in dead and v not in dead
    )
    with open(path, "w") as out:
        out.write(f"{len(active)}\n")
        for v in active:
            out.write(f"{v}\n")
        out.write("E\n")
        for u, v in edges:
            out.write(f"{u} {v}\n")


if __name__ == "__main__":
    main(sys.argv[1])
