"""Writes the example models, strategies, channels and states under data/."""

import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"


def mat(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def reg(*pairs):
    return [{"name": n, "dim": d} for n, d in pairs]


def channel(inp, out, kraus):
    return {"input": reg(*inp), "output": reg(*out), "kraus": [mat(k) for k in kraus]}


def state(register, rho):
    return {"register": reg(*register), "matrix": mat(rho)}


def ket(d, i):
    v = np.zeros(d)
    v[i] = 1.0
    return v


def classical(w):
    """Kraus operators sqrt(w[y][x]) |y><x| of a stochastic matrix."""
    w = np.asarray(w, dtype=float)
    out = []
    for y in range(w.shape[0]):
        for x in range(w.shape[1]):
            if w[y, x] > 0:
                k = np.zeros(w.shape)
                k[y, x] = np.sqrt(w[y, x])
                out.append(k)
    return out


def write(rel, doc):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def copy_action(dg):
    """|g> -> |g>_S |g>_S0."""
    k = np.zeros((dg * dg, dg))
    for g in range(dg):
        k[g * dg + g, g] = 1.0
    return channel([("G", dg)], [("S", dg), ("S0", dg)], [k])


def registers(dg, da, db):
    return reg(("G", dg), ("S", dg), ("S0", dg), ("A", da), ("B", db))


def channels():
    i2 = np.eye(2)
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    z = np.diag([1.0, -1.0])
    p = 0.5
    write("channels/identity.json", channel([("A", 2)], [("B", 2)], [i2]))
    write(
        "channels/depolarizing.json",
        channel([("A", 2)], [("B", 2)], [np.sqrt(1 - 3 * p / 4) * i2] + [np.sqrt(p / 4) * m for m in (x, y, z)]),
    )
    write("channels/dephasing.json", channel([("A", 2)], [("B", 2)], [np.sqrt(1 - p / 2) * i2, np.sqrt(p / 2) * z]))
    write("channels/classical_stochastic.json", channel([("X", 2)], [("Y", 2)], classical([[0.9, 0.1], [0.1, 0.9]])))


def identity_qubit():
    # B receives A; S is discarded.
    kraus = [np.kron(ket(2, s)[None, :], np.eye(2)) for s in range(2)]
    model = {
        "metadata": {"name": "identity_qubit", "description": "A is delivered to B untouched; S is discarded."},
        "registers": registers(2, 2, 2),
        "action_channel": copy_action(2),
        "comm_channel": channel([("S", 2), ("A", 2)], [("B", 2)], kraus),
    }
    write("models/identity_qubit.json", model)
    strategy = {
        "p_vu": [[0.5, 0.5]],
        "action_states": [state([("G", 2)], np.outer(ket(2, u), ket(2, u))) for u in range(2)],
        "encoders": [channel([("S0", 2)], [("A", 2)], [np.eye(2)])],
    }
    write("strategies/identity_qubit.json", strategy)


def depolarizing_qubit():
    kraus = [np.outer(ket(2, b), ket(4, i)) / np.sqrt(2) for b in range(2) for i in range(4)]
    model = {
        "metadata": {"name": "depolarizing_qubit", "description": "Every input is replaced by the maximally mixed state."},
        "registers": registers(2, 2, 2),
        "action_channel": copy_action(2),
        "comm_channel": channel([("S", 2), ("A", 2)], [("B", 2)], kraus),
    }
    write("models/depolarizing_qubit.json", model)


# Classical binary instance: s = g w.p. 0.8, s0 = s w.p. 0.9, y = a xor s xor noise(0.05).
P_S_G = 0.8
P_S0_S = 0.9
P_Y_FLIP = 0.05
P_VU = [[0.3, 0.2], [0.15, 0.35]]
P_G_U = [[0.9, 0.1], [0.2, 0.8]]
P_A_KEEP = 0.85


def classical_tables():
    w_action = np.zeros((4, 2))
    for g in range(2):
        for s in range(2):
            for s0 in range(2):
                ps = P_S_G if s == g else 1 - P_S_G
                ps0 = P_S0_S if s0 == s else 1 - P_S0_S
                w_action[s * 2 + s0, g] = ps * ps0
    w_comm = np.zeros((2, 4))
    for s in range(2):
        for a in range(2):
            for y in range(2):
                w_comm[y, s * 2 + a] = 1 - P_Y_FLIP if y == a ^ s else P_Y_FLIP
    w_enc = []
    for v in range(2):
        w = np.zeros((2, 2))
        for s0 in range(2):
            for a in range(2):
                w[a, s0] = P_A_KEEP if a == s0 ^ v else 1 - P_A_KEEP
        w_enc.append(w)
    return w_action, w_comm, w_enc


def classical_binary():
    w_action, w_comm, w_enc = classical_tables()
    model = {
        "metadata": {
            "name": "classical_binary",
            "description": "Diagonal binary instance with a noisy action, noisy side information and a binary symmetric channel.",
        },
        "registers": registers(2, 2, 2),
        "action_channel": channel([("G", 2)], [("S", 2), ("S0", 2)], classical(w_action)),
        "comm_channel": channel([("S", 2), ("A", 2)], [("B", 2)], classical(w_comm)),
    }
    write("models/classical_binary.json", model)
    strategy = {
        "p_vu": P_VU,
        "action_states": [state([("G", 2)], np.diag(P_G_U[u])) for u in range(2)],
        "encoders": [channel([("S0", 2)], [("A", 2)], classical(w)) for w in w_enc],
    }
    write("strategies/classical_binary.json", strategy)


def designed_orthogonal(nu=2, nv=8):
    # B carries S and A intact, so every (v, u) yields an orthogonal output.
    model = {
        "metadata": {
            "name": "designed_orthogonal",
            "description": "Qubit action copied to S and S0; B receives S and A unchanged.",
        },
        "registers": registers(2, nv, 2 * nv),
        "action_channel": copy_action(2),
        "comm_channel": channel([("S", 2), ("A", nv)], [("B", 2 * nv)], [np.eye(2 * nv)]),
    }
    write("models/designed_orthogonal.json", model)
    strategy = {
        "p_vu": [[1.0 / (nu * nv)] * nu for _ in range(nv)],
        "action_states": [state([("G", 2)], np.outer(ket(2, u), ket(2, u))) for u in range(nu)],
        "encoders": [
            channel([("S0", 2)], [("A", nv)], [np.outer(ket(nv, v), ket(2, i)) for i in range(2)]) for v in range(nv)
        ],
    }
    write("strategies/designed_orthogonal.json", strategy)


def bell():
    phi = (np.kron(ket(2, 0), ket(2, 0)) + np.kron(ket(2, 1), ket(2, 1))) / np.sqrt(2)
    write("states/bell.json", state([("A", 2), ("B", 2)], np.outer(phi, phi)))


if __name__ == "__main__":
    channels()
    identity_qubit()
    depolarizing_qubit()
    classical_binary()
    designed_orthogonal()
    bell()
