"""Extended-precision reference values of the coefficient closed forms.

Writes tcl_reference.csv: t, delta_bar, gamma on 1000 points over
[0, 20/omega_c] for alpha = 0.1 1/s, omega0 = 1e7 rad/s, r = 10, T = 300 K.
"""
from mpmath import mp, mpf, exp, sin, cos

mp.dps = 50
HBAR = mpf("1.0545718e-34")
K_B = mpf("1.380649e-23")
alpha, omega0, r, temp = mpf("0.1"), mpf("1e7"), mpf(10), mpf(300)
omega_c = r * omega0
x0 = HBAR * omega0 / (K_B * temp)

with open("tcl_reference.csv", "w") as out:
    out.write("t,delta_bar,gamma\n")
    for i in range(1000):
        t = mpf(i) * (mpf(20) / omega_c) / 999
        # Rounded to f64 the same way the Rust side builds its grid.
        t = mpf(float(t))
        x = omega_c * t
        e = exp(-x)
        d = alpha / x0 * r / (r * r + 1) * (e * sin(x / r) + r * (1 - e * cos(x / r)))
        g = alpha / 2 * r * r / (r * r + 1) * (1 - e * cos(x / r) - r * e * sin(x / r))
        out.write(f"{mp.nstr(t, 20, min_fixed=1, max_fixed=0)},{mp.nstr(d, 20, min_fixed=1, max_fixed=0)},{mp.nstr(g, 20, min_fixed=1, max_fixed=0)}\n")
