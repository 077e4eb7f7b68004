#!/usr/bin/env python3
"""Brute-force expected deontic utility for a model file.

Written straight from the definitions, sharing no code with the Rust crate:
for every agent and moment with a nontrivial choice, and every cell L,

    EU(L) = sum over moments m2 related to m, histories h2 in the cluster of
            L at m2, of mu({<m2,h2>} | info(<m2,h2>)) * value(h2)

Usage: eu_oracle.py MODEL [OUT]
"""

import json
import sys
from fractions import Fraction


def load(path):
    with open(path) as f:
        doc = json.load(f)
    parent = {m["name"]: m["parent"] for m in doc["moments"]}
    children = {n for n in parent.values() if n is not None}
    tips = sorted(n for n in parent if n not in children)
    moments = sorted(children | {n for n, p in parent.items() if p is None and n not in tips})

    def above(tip):
        out, n = [], parent[tip]
        while n is not None:
            out.append(n)
            n = parent[n]
        return out

    through = {m: [h for h in tips if m in above(h)] for m in moments}
    indices = [(m, h) for m in moments for h in through[m]]
    return doc, moments, through, indices


def classes(doc, agent, indices):
    rep = {i: i for i in indices}

    def find(i):
        while rep[i] != i:
            i = rep[i]
        return i

    for a, b in doc.get("epistemic", {}).get(agent, []):
        x = find(tuple(a.split("/")))
        y = find(tuple(b.split("/")))
        rep[x] = y
    groups = {}
    for i in indices:
        groups.setdefault(find(i), set()).add(i)
    return {i: frozenset(groups[find(i)]) for i in indices}


def mu(layers, a, b):
    for layer in layers:
        mass_b = sum(layer.get(i, Fraction(0)) for i in b)
        if mass_b > 0:
            return sum(layer.get(i, Fraction(0)) for i in a & b) / mass_b
    return Fraction(1)


def expected_utilities(path):
    doc, moments, through, indices = load(path)
    values = {h: Fraction(v) for h, v in doc.get("values", {}).items()}
    out = {}
    for agent in doc["agents"]:
        info = classes(doc, agent, indices)
        layers = [
            {tuple(k.split("/")): Fraction(v) for k, v in layer.items()}
            for layer in doc["measures"][agent]
        ]
        for m in moments:
            cells = doc.get("choices", {}).get(f"{m}/{agent}")
            if not cells or len(cells) < 2:
                continue
            related = [
                m2
                for m2 in moments
                if any(info[(m, h)] >= {(m2, h2)} for h in through[m] for h2 in through[m2])
            ]
            table = {}
            for cell in cells:
                total = Fraction(0)
                for m2 in related:
                    for h2 in through[m2]:
                        if any((m2, h2) in info[(m, h)] for h in cell):
                            weight = mu(layers, {(m2, h2)}, info[(m2, h2)])
                            total += weight * values.get(h2, Fraction(0))
                table["{" + ",".join(sorted(cell)) + "}"] = str(total)
            out.setdefault(agent, {})[m] = table
    return out


def main():
    result = json.dumps(expected_utilities(sys.argv[1]), indent=2, sort_keys=True) + "\n"
    if len(sys.argv) > 2:
        with open(sys.argv[2], "w") as f:
            f.write(result)
    else:
        sys.stdout.write(result)


if __name__ == "__main__":
    main()
