"""Classical brute-force value of I(VU;Y) - I(V;S|U) for the diagonal binary instance.

Transition probabilities are read back from the Kraus operators in the data
files as sum_k |K_k[y, x]|^2, then the full joint over (v, u, g, s, s0, a, y)
is enumerated.
"""

import itertools
import json
import pathlib

import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(rel):
    return json.loads((DATA / rel).read_text())


def cmat(spec):
    return np.array([[complex(re, im) for re, im in row] for row in spec])


def transition(ch):
    return sum(np.abs(cmat(k)) ** 2 for k in ch["kraus"])


def entropy(p):
    p = np.asarray(p).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def main():
    model = load("models/classical_binary.json")
    strat = load("strategies/classical_binary.json")
    w_action = transition(model["action_channel"])  # [s*2+s0, g]
    w_comm = transition(model["comm_channel"])  # [y, s*2+a]
    w_enc = [transition(e) for e in strat["encoders"]]  # [a, s0]
    p_g_u = [np.real(np.diag(cmat(st["matrix"]))) for st in strat["action_states"]]
    p_vu = np.array(strat["p_vu"])
    nv, nu = p_vu.shape

    joint = np.zeros((nv, nu, 2, 2))  # v, u, s, y
    for v, u, g, s, s0, a, y in itertools.product(range(nv), range(nu), range(2), range(2), range(2), range(2), range(2)):
        joint[v, u, s, y] += (
            p_vu[v, u] * p_g_u[u][g] * w_action[s * 2 + s0, g] * w_enc[v][a, s0] * w_comm[y, s * 2 + a]
        )

    p_vuy = joint.sum(axis=2)
    i_vuy = entropy(p_vuy.sum(axis=2)) + entropy(p_vuy.sum(axis=(0, 1))) - entropy(p_vuy)
    p_vus = joint.sum(axis=3)
    i_vs_u = (
        entropy(p_vus.sum(axis=2))
        + entropy(p_vus.sum(axis=0))
        - entropy(p_vus)
        - entropy(p_vus.sum(axis=(0, 2)))
    )
    out = {
        "model": "data/models/classical_binary.json",
        "strategy": "data/strategies/classical_binary.json",
        "i_vub": i_vuy,
        "i_vs_given_u": i_vs_u,
        "r_low": i_vuy - i_vs_u,
    }
    (DATA / "fixtures" / "classical_binary.expected.json").write_text(json.dumps(out, indent=1) + "\n")
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
