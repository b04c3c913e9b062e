"""Tour of the bath layer: correlation function, transforms, certificates.

The reference spectral weight rho(omega) = omega^2 exp(-omega) has every
transform in closed form, which makes it easy to see what the quadrature
machinery is supposed to reproduce.
"""

import numpy as np

from awwlab import bath as B

bath = B.reference_bath()

print("=== correlation function gamma(t) = 2/(1+it)^3 ===")
for t in (0.0, 0.5, 1.0, 5.0):
    print(f"  gamma({t:>4}) = {B.correlation(bath, t):+.6f}")

print("\n=== L1 norm and decay certificate ===")
print(f"  ||gamma||_L1        = {B.correlation_l1_norm(bath):.9f}  (exact: 4)")
print(f"  |gamma| <= 6/(1+t)^3 holds: {B.check_decay_bound(bath)}")

print("\n=== Fourier transform ghat(alpha) = sqrt(2 pi) alpha^2 e^-alpha ===")
for a in (0.5, 1.0, 2.0):
    print(f"  ghat({a}) = {float(B.fourier_hat(bath, a)):.6f}")

print("\n=== half-line transform int_0^T e^{i x alpha} gamma(x) dx ===")
for T in (1.0, 5.0, 20.0, np.inf):
    val = B.half_line_transform(bath, 1.0, T)
    print(f"  T = {T:>4}: {val:+.6f}")
print("  the T = inf real part equals pi rho(1) =", f"{np.pi * np.exp(-1):.6f}")

print("\n=== golden-rule decay rate and level shift ===")
beta, shift = B.decay_and_shift(bath, 1.0, 1.0)
print(f"  beta  = {beta:.6f}  (exact: pi/e = {np.pi * np.exp(-1):.6f})")
print(f"  shift = {shift:+.6f}")
