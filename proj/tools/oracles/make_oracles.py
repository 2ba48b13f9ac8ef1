"""Regenerate the frozen oracle tables in tests/data with mpmath (50 digits)."""
import json
import random
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parents[2] / "tests" / "data"

P = dict(alpha_pl=mp.mpf("3.04"), C=mp.mpf("-23.29"), D=mp.mpf("4.14"),
         theta0=mp.mpf("-3.61"), eta0=mp.mpf("20.70"))


def channel_grid():
    rng = random.Random(7)
    rows = []
    for _ in range(50):
        ux, uy = rng.uniform(-800, 800), rng.uniform(-800, 800)
        uz = rng.uniform(40, 120)
        ex, ey = rng.uniform(-300, 300), rng.uniform(-300, 300)
        ez = rng.uniform(0, 35)
        d = mp.sqrt((mp.mpf(ux) - ex) ** 2 + (mp.mpf(uy) - ey) ** 2)
        theta = mp.degrees(mp.atan((mp.mpf(uz) - ez) / d))
        ter = 10 * P["alpha_pl"] * mp.log10(max(d, 1))
        x = theta - P["theta0"]
        eta = P["C"] * x * mp.exp(-x / P["D"]) + P["eta0"]
        rows.append([ux, uy, uz, ex, ey, ez] + [float(v) for v in (d, theta, ter, eta, ter + eta)])
    with open(OUT / "channel_grid.csv", "w") as f:
        f.write("ux,uy,uz,ex,ey,ez,d,theta_deg,terrestrial_db,excess_db,total_db\n")
        for r in rows:
            f.write(",".join(repr(float(v)) for v in r) + "\n")


def spd(rng):
    a = mp.matrix(4, 4)
    for i in range(4):
        for j in range(4):
            a[i, j] = rng.uniform(-1, 1)
    m = a * a.T
    for i in range(4):
        m[i, i] += rng.uniform(0.05, 1.0)
    return m


def bhatt(m1, c1, m2, c2):
    avg = (c1 + c2) / 2
    dm = m1 - m2
    maha = (dm.T * mp.inverse(avg) * dm)[0]
    return maha / 8 + mp.log(mp.det(avg) / mp.sqrt(mp.det(c1) * mp.det(c2))) / 2


def bhatt_pairs():
    rng = random.Random(11)
    out = []
    for _ in range(20):
        m1 = mp.matrix([rng.uniform(-2, 2) for _ in range(4)])
        m2 = mp.matrix([rng.uniform(-2, 2) for _ in range(4)])
        c1, c2 = spd(rng), spd(rng)
        # round inputs to doubles first so the C++ side sees identical data
        m1 = mp.matrix([float(v) for v in m1]); m2 = mp.matrix([float(v) for v in m2])
        c1 = mp.matrix([[float(c1[i, j]) for j in range(4)] for i in range(4)])
        c2 = mp.matrix([[float(c2[i, j]) for j in range(4)] for i in range(4)])
        c1 = (c1 + c1.T) / 2; c2 = (c2 + c2.T) / 2
        out.append({
            "mu1": [float(v) for v in m1], "mu2": [float(v) for v in m2],
            "cov1": [[float(c1[i, j]) for j in range(4)] for i in range(4)],
            "cov2": [[float(c2[i, j]) for j in range(4)] for i in range(4)],
            "distance": float(bhatt(m1, c1, m2, c2)),
        })
    (OUT / "bhattacharyya_pairs.json").write_text(json.dumps(out, indent=1))


def scalars():
    # excess loss at 10 deg, SKL toy, path loss at d=500 heights 60/30
    x = mp.mpf(10) - P["theta0"]
    eta10 = P["C"] * x * mp.exp(-x / P["D"]) + P["eta0"]
    pi = [mp.mpf("0.9"), mp.mpf("0.1")]; lam = [mp.mpf("0.1"), mp.mpf("0.9")]
    kl = lambda p, q: sum(a * mp.log(a / b) for a, b in zip(p, q))
    skl = (mp.mpf("0.5") + mp.mpf("0.5")) * (kl(pi, lam) + kl(lam, pi))
    th = mp.degrees(mp.atan(mp.mpf(30) / 500))
    xt = th - P["theta0"]
    pl500 = 10 * P["alpha_pl"] * mp.log10(500) + P["C"] * xt * mp.exp(-xt / P["D"]) + P["eta0"]
    snr, jsr = mp.mpf(10) ** mp.mpf("1.5"), mp.mpf(10) ** mp.mpf("0.6")
    h1_db = 10 * mp.log10(1 / (jsr + 1 / snr))
    (OUT / "scalars.json").write_text(json.dumps({
        "excess_at_10deg": float(eta10), "skl_toy": float(skl),
        "pathloss_d500_h60_30": float(pl500), "sinr_h1_db": float(h1_db)}, indent=1))


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    channel_grid(); bhatt_pairs(); scalars()
