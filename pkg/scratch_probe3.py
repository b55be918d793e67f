"""Probe dynamics-dependent oracles: morawetz, smoothing, sobolev, scattering,
zeta2 discrepancy, small-data linear agreement, time reversal."""
import time
import warnings

import numpy as np

from hyplab import (GeometryBackend, FlowConfig, build_operator, make_grid,
                    evolve_linear, evolve_nls, mass, energy, heat,
                    solve_difference_zeta2)
from hyplab.analysis import (check_local_smoothing, check_modified_morawetz,
                             check_morawetz_action_bound, check_radial_sobolev,
                             local_smoothing_ratio, morawetz_action,
                             scattering_diagnostic, spacetime_norm,
                             spatial_weight)
from hyplab.highlow import make_rough_datum

warnings.simplefilter("ignore")
H, E = GeometryBackend.HYPERBOLIC2, GeometryBackend.EUCLIDEAN2
op = build_operator(make_grid(H, 15.0, 512))
rng = np.random.default_rng(3)

# --- morawetz action bound over 100 random smooth fields
rep = check_morawetz_action_bound(op, 100, seed=0)
print(f"[M1] morawetz action fitted C = {rep.fitted_constant:.4f} (cap 2)")

# conjugation antisymmetry
f = op.from_coefficients((rng.standard_normal(op.n)+1j*rng.standard_normal(op.n))
                         * (1+op.eigenvalues)**-1.0)
print(f"[M2] antisymmetry: {morawetz_action(op, np.conj(f)) + morawetz_action(op, f):.2e}")

# oscillatory closed form: f = e^{i k r} g, slowly varying g
r = op.grid.nodes
g = np.exp(-((r-4.0)/2.5)**2)
for kappa in (3.0, 6.0):
    fphase = np.exp(1j*kappa*r) * g
    ma = morawetz_action(op, fphase)
    from hyplab.geometry import morawetz_weight_gradient
    closed = 2*kappa*float(np.sum(op.grid.quad_weights * morawetz_weight_gradient(H, r) * g**2))
    print(f"[M3] kappa={kappa}: action={ma:.5f} closed={closed:.5f} rel={(ma-closed)/closed:.2e}")

# --- modified morawetz on a cubic run (N=0), t_end=4
coeffs = np.exp(-op.eigenvalues) * (rng.standard_normal(op.n)+1j*rng.standard_normal(op.n))
u0 = op.from_coefficients(coeffs); u0 *= 0.6/np.max(np.abs(u0))
t0 = time.time()
traj = evolve_nls(op, u0, FlowConfig(p=3, dt=1e-3, t_end=4.0, record_every=4))
print(f"    cubic run 4000 steps in {time.time()-t0:.1f}s")
rep = check_modified_morawetz(op, traj)
print(f"[M4] modified morawetz C = {rep.fitted_constant:.4f} valid={rep.valid} "
      f"residual={rep.extras['pde_residual']:.2e}")

# --- local smoothing: single-mode closed form
v1 = op.eigenvectors[:, 0]
ratio = local_smoothing_ratio(op, v1, 1.0)
w = spatial_weight(op, 0.1)
closed = np.sqrt(1.0) * op.lambda_min**0.25 * op.norm(w * v1) / op.norm(v1)
print(f"[S1] single mode: ratio={ratio:.8f} closed={closed:.8f} rel={(ratio-closed)/closed:.2e}")

# horizon sweep for 20 random data
t0 = time.time()
factors = []
for i in range(20):
    c = (np.random.default_rng(100+i).standard_normal(op.n)
         + 1j*np.random.default_rng(200+i).standard_normal(op.n)) * (1+op.eigenvalues)**-1.0
    f0 = op.from_coefficients(c)
    rep = check_local_smoothing(op, f0, horizons=(1.0, 10.0, 100.0))
    factors.append((rep.lhs[0], rep.lhs[1], rep.lhs[2], *rep.extras["growth_factors"]))
factors = np.array(factors)
print(f"[S2] ratios r(1)={factors[:,0].mean():.3f} r(10)={factors[:,1].mean():.3f} "
      f"r(100)={factors[:,2].mean():.3f}")
print(f"     growth 1->10: mean={factors[:,3].mean():.3f} max={factors[:,3].max():.3f} "
      f"(unitary sqrt10={np.sqrt(10):.3f})")
print(f"     growth 10->100: mean={factors[:,4].mean():.3f} max={factors[:,4].max():.3f}  "
      f"time={time.time()-t0:.1f}s")

# --- radial sobolev + GN
t0 = time.time()
reps = check_radial_sobolev(op, 50, seed=1)
for k, v in reps.items():
    print(f"[R] {k}: C={v.fitted_constant:.4f}")
print(f"    time={time.time()-t0:.1f}s")
# alpha=1/2 variant coincides with (i)
ca = reps["weighted_embedding_alpha_0.5"].fitted_constant
ci = reps["weighted_embedding"].fitted_constant
print(f"    alpha=0.5 vs base: {abs(ca-ci):.2e}")

# --- zeta2 discrepancy scaling
phi = make_rough_datum(op, 0.9, seed=11, amplitude=1.0)
phi *= 0.5/np.max(np.abs(phi))
s0 = 1e-2
eta0 = heat(op, s0, phi); psi0 = phi - eta0
for dt in (2e-3, 1e-3, 5e-4):
    cfg = FlowConfig(p=3, dt=dt, t_end=0.5, record_every=1)
    u_t = evolve_nls(op, phi, cfg)
    z1_t = evolve_nls(op, eta0, cfg)
    psi_t = evolve_nls(op, psi0, cfg, self_interacting=False)  # linear flow path
    sol = solve_difference_zeta2(op, u_t, psi_t, z1_t)
    scale = max(np.max(np.abs(sol.algebraic)), 1e-300)
    print(f"[Z] dt={dt}: discrepancy={sol.discrepancy:.3e} "
          f"sup|zeta2|={np.max(np.abs(sol.algebraic)):.3e} "
          f"ratio/dt^2={sol.discrepancy/dt**2:.3f}")

# --- psi0 = 0 degenerate: zeta2 == 0
cfg = FlowConfig(p=3, dt=1e-3, t_end=0.2, record_every=1)
u_t = evolve_nls(op, phi, cfg)
z1_t = evolve_nls(op, phi, cfg)
zero = np.zeros(op.n, dtype=complex)
psi_t = evolve_nls(op, zero, cfg, self_interacting=False)
sol = solve_difference_zeta2(op, u_t, psi_t, z1_t)
print(f"[Z0] psi0=0: max|zeta2_alg|={np.max(np.abs(sol.algebraic)):.2e} "
      f"max|zeta2_dir|={np.max(np.abs(sol.direct)):.2e}")

# --- small data linear agreement
small = u0 * (1e-3/np.max(np.abs(u0)))
tr = evolve_nls(op, small, FlowConfig(p=3, dt=1e-3, t_end=1.0, record_every=1000))
lin = evolve_linear(op, small, 1.0)
print(f"[L] small-data gap={op.norm(tr.fields[-1]-lin):.3e} vs "
      f"||u||^3 t={op.norm(small)*np.max(np.abs(small))**2:.3e}")

# --- time reversal
tr = evolve_nls(op, u0, FlowConfig(p=3, dt=1e-3, t_end=0.5, record_every=500))
back = evolve_nls(op, np.conj(tr.fields[-1]), FlowConfig(p=3, dt=1e-3, t_end=0.5, record_every=500))
print(f"[T] reversal gap={op.norm(np.conj(back.fields[-1])-u0):.3e}")

# --- scattering contrast (small amplitude, ℍ² vs ℝ²)
t0 = time.time()
for backend, name in ((H, "H2"), (E, "R2")):
    opb = op if backend is H else build_operator(make_grid(E, 15.0, 512))
    rloc = opb.grid.nodes
    f0 = np.exp(-rloc**2).astype(complex)
    f0 *= 0.4/np.max(np.abs(f0))
    trb = evolve_nls(opb, f0, FlowConfig(p=3, dt=1e-3, t_end=16.0, record_every=100))
    repb = scattering_diagnostic(opb, trb, 0.9, [2.0, 4.0, 8.0, 16.0])
    print(f"[SC] {name}: consecutive diffs {[f'{d:.5f}' for d in repb.consecutive]} "
          f"decreasing={repb.is_cauchy_decreasing()}")
print(f"    scattering runs time={time.time()-t0:.1f}s")
