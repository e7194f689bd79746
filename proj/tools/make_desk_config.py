#!/usr/bin/env python3
"""Writes configs/desk.json: N=2 relays, K=2 destinations, |F|=2, |M|=3, T=10.

Every link is independently good with probability 0.6. Relay n contributes
s_nk to destination k: 2 when its first-hop link and its link to k are both
good, 1 when only the link to k is good (it forwards a noisy copy), 0 otherwise.
With s_k the sum over relays, scheme 1 serves destination 1 at 4 bits/symbol
and needs s_1 >= 2, scheme 2 mirrors it for destination 2, and scheme 3
superposes 2.5 bits/symbol to each destination and needs s_1 >= 2 and s_2 >= 2.
Every (scheme, g1) pair is supported by some second-hop state, so no virtual
queue is undrainable.
"""
import itertools
import json
import sys

N, K, T = 2, 2, 10
P_GOOD = 0.6
ALPHABET = ["good", "bad"]
SCHEMES = [
    {"id": 1, "rates": [4.0, 0.0]},
    {"id": 2, "rates": [0.0, 4.0]},
    {"id": 3, "rates": [2.5, 2.5]},
]


def contribution(g1, g2):
    return [
        sum((2 if g1[n] == "good" else 1) for n in range(N) if g2[n * K + k] == "good")
        for k in range(K)
    ]


def supported(scheme_id, g1, g2):
    s = contribution(g1, g2)
    if scheme_id == 1:
        return s[0] >= 2
    if scheme_id == 2:
        return s[1] >= 2
    return s[0] >= 2 and s[1] >= 2


def main(path):
    firsts = list(itertools.product(ALPHABET, repeat=N))
    seconds = list(itertools.product(ALPHABET, repeat=N * K))
    states = []
    for f1 in firsts:
        for f2 in seconds:
            p = 1.0
            for label in f1 + f2:
                p *= P_GOOD if label == "good" else 1.0 - P_GOOD
            states.append({"f1": list(f1), "f2": list(f2), "p": p})
    support = [
        {"m": s["id"], "g1": list(g1), "g2": list(g2)}
        for s in SCHEMES
        for g1 in firsts
        for g2 in seconds
        if supported(s["id"], g1, g2)
    ]
    config = {
        "shape": {"N": N, "K": K, "T": T},
        "fading": {"alphabet": ALPHABET, "states": states},
        "schemes": SCHEMES,
        "support": support,
    }
    with open(path, "w") as f:
        json.dump(config, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "configs/desk.json")
