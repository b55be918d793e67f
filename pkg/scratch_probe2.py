"""Probe rough-datum coefficient laws against the required scaling behavior.

Law A (spec text):  c_k = amp * xi_k * (1+lam_k)^{-(s+1)/2} * k^{-1/2+delta}
Law B (borderline): c_k = amp * xi_k * (1+lam_k)^{-s/2}     * k^{-1/2+delta} / sqrt(lam-density)
   -- plain:        c_k = amp * xi_k * (1+lam_k)^{-s/2}     * k^{-1/2+delta}

Checks: (i) H^s stability / H^sigma growth under n = 256 -> 512 -> 1024;
(ii) slopes of log||eta0||_H1 and log||psi0||_L2 vs log s0 for s = 0.8.
"""
import numpy as np

from hyplab import GeometryBackend, build_operator, make_grid
from hyplab.heat_lp import heat

H = GeometryBackend.HYPERBOLIC2
DELTA = 0.01


def datum(op, s, seed, law, amplitude=1.0):
    n = op.n
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * rng.random(n))
    k = np.arange(1, n + 1, dtype=float)
    lam = op.eigenvalues
    if law == "A":
        c = amplitude * phases * (1.0 + lam) ** (-(s + 1) / 2) * k ** (-0.5 + DELTA)
    else:
        c = amplitude * phases * (1.0 + lam) ** (-s / 2) * k ** (-0.5 + DELTA)
    return c


def hnorm(op, c, sigma):
    return np.sqrt(np.sum((1.0 + op.eigenvalues) ** sigma * np.abs(c) ** 2))


ops = {n: build_operator(make_grid(H, 15.0, n)) for n in (256, 512, 1024)}

for law in ("A", "B"):
    print(f"--- law {law} ---")
    s = 0.8
    for sigma in (s, 1.0):
        vals = [hnorm(ops[n], datum(ops[n], s, 7, law), sigma) for n in (256, 512, 1024)]
        growth = [vals[i + 1] / vals[i] for i in range(2)]
        print(f"  s={s} sigma={sigma}: norms={[f'{v:.4f}' for v in vals]} "
              f"growth/doubling={[f'{g:.4f}' for g in growth]}")
    # split slopes on the n=512 operator
    op = ops[512]
    c = datum(op, s, 7, law)
    phi = op.from_coefficients(c)
    s0s = np.geomspace(1e-3, 1e-1, 6)
    eta_h1, psi_l2 = [], []
    for s0 in s0s:
        eta = heat(op, s0, phi)
        psi = phi - eta
        eta_h1.append(op.sobolev_norm(eta, 1.0))
        psi_l2.append(op.norm(psi))
    fit1 = np.polyfit(np.log(s0s), np.log(eta_h1), 1)[0]
    fit2 = np.polyfit(np.log(s0s), np.log(psi_l2), 1)[0]
    print(f"  eta0 H1 slope: {fit1:.4f} (target {(s-1)/2:+.3f})   "
          f"psi0 L2 slope: {fit2:.4f} (target {s/2:+.3f})")

# rng stream prefix property for refinement studies
r1 = np.random.default_rng(123).random(512)
r2 = np.random.default_rng(123).random(1024)
print("rng prefix stable:", np.array_equal(r1, r2[:512]))
