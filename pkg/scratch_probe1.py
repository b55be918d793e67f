"""Probe core numerics: spectrum, quadrature order, heat/LP, conservation."""
import time

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import j0

from hyplab import (GeometryBackend, FlowConfig, build_operator, make_grid,
                    evolve_linear, evolve_nls, mass, energy,
                    make_ladder, bernstein_sweep, heat)

H = GeometryBackend.HYPERBOLIC2
E = GeometryBackend.EUCLIDEAN2

# 1. spectral gap + timing
t0 = time.time()
op = build_operator(make_grid(H, 15.0, 512))
print(f"[1] hyperbolic (15,512): lambda_min={op.lambda_min:.8f}  "
      f"lambda_max={op.lambda_max:.1f}  build={time.time()-t0:.2f}s")
for (rm, n) in [(5.0, 128), (8.0, 200), (12.0, 384)]:
    o = build_operator(make_grid(H, rm, n))
    print(f"    (r_max={rm}, n={n}): lambda_min={o.lambda_min:.8f}")

# 2. Euclidean Bessel eigenvalue
j01 = brentq(j0, 2.0, 3.0)
for n in (256, 512):
    oe = build_operator(make_grid(E, 1.0, n))
    rel = abs(oe.lambda_min - j01**2) / j01**2
    print(f"[2] euclid n={n}: lam1={oe.lambda_min:.6f} vs {j01**2:.6f} rel={rel:.2e}")

# 3. symmetry residual via stencil
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(20):
    f = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    g = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    lhs = op.inner(op.apply_stencil(f), g)
    rhs = op.inner(f, op.apply_stencil(g))
    worst = max(worst, abs(lhs - rhs) / (op.norm(f) * op.norm(g)))
print(f"[3] symmetry residual: {worst:.2e}")
gram = (op.eigenvectors.T * op.grid.quad_weights) @ op.eigenvectors
print(f"    gram deviation: {np.max(np.abs(gram - np.eye(op.n))):.2e}")
# stencil vs spectral application
f = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
d = op.norm(op.apply_stencil(f) - op.apply_spectral_function(lambda l: l, f))
print(f"    stencil vs spectral: {d / op.norm(op.apply_stencil(f)):.2e}")

# 4. quadrature convergence on exp(-r^2), hyperbolic r_max=2
exact, _ = quad(lambda r: np.exp(-r * r) * np.sinh(r), 0.0, 2.0, epsabs=1e-14)
errs = []
for n in (199, 399, 799):
    g = make_grid(H, 2.0, n)
    val = g.integrate(np.exp(-g.nodes**2))
    errs.append(abs(val - exact))
print(f"[4] quad errors {errs}, ratios {[errs[i]/errs[i+1] for i in range(2)]}")

# 5. heat decay + LP ladder
fr = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
for s in (0.1, 1.0, 5.0):
    ratio = op.norm(heat(op, s, fr)) / op.norm(fr)
    print(f"[5] heat s={s}: ratio={ratio:.4f} vs e^(-s/4)={np.exp(-s/4):.4f}")
lad = make_ladder(op, fr, 64)
print(f"    ladder m=64: residual={lad.reconstruction_residual(fr):.2e} "
      f"range=({lad.s_values[0]:.2e},{lad.s_values[-1]:.2e})")
lad32 = make_ladder(op, fr, 32)
print(f"    ladder m=32: residual={lad32.reconstruction_residual(fr):.2e}")

# 6. Bernstein sweep constants at (3/4, 1/4)
s_list = np.geomspace(1e-3, 1e2, 40)
worst_lo = worst_hi = 0.0
for _ in range(20):
    f = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    tab = bernstein_sweep(op, f, 0.75, 0.25, s_list)
    worst_lo = max(worst_lo, tab["R_low"].max())
    worst_hi = max(worst_hi, tab["R_high"].max())
print(f"[6] bernstein worst R_low={worst_lo:.4f} R_high={worst_hi:.4f}")

# 7. conservation on a smooth moderate field, t_end=1, dt=1e-3
coeffs = np.exp(-op.eigenvalues) * (
    rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n))
u0 = op.from_coefficients(coeffs)
u0 = u0 * (0.5 / np.max(np.abs(u0)))
print(f"    sup|u0|={np.max(np.abs(u0)):.3f} mass={mass(op.grid, u0):.4f} "
      f"energy={energy(op, u0):.4f}")
t0 = time.time()
import warnings
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    drifts = {}
    for dt in (1e-3, 5e-4, 2.5e-4):
        cfg = FlowConfig(p=3, dt=dt, t_end=1.0, record_every=200)
        tr = evolve_nls(op, u0, cfg)
        m_drift = np.max(np.abs(tr.mass - tr.mass[0])) / tr.mass[0]
        e_drift = np.max(np.abs(tr.energy - tr.energy[0])) / abs(tr.energy[0])
        drifts[dt] = e_drift
        print(f"[7] dt={dt}: mass drift={m_drift:.2e} energy drift={e_drift:.2e}")
print(f"    orders: {np.log2(drifts[1e-3]/drifts[5e-4]):.2f}, "
      f"{np.log2(drifts[5e-4]/drifts[2.5e-4]):.2f}  time={time.time()-t0:.1f}s")

# 8. linear flow unitarity
w = evolve_linear(op, u0, 3.7)
print(f"[8] unitarity: {abs(mass(op.grid, w) - mass(op.grid, u0)):.2e} "
      f"H1 {abs(op.sobolev_norm(w,1.0)-op.sobolev_norm(u0,1.0)):.2e}")
