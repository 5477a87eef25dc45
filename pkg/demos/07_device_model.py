"""Circuit model of the coupled-transmon pair behind the V-system.

Two identical pads with a coupling capacitor reduce to a bright (dipolar)
and a dark (quadrupolar) mode with a cross-Kerr coupling equal to the
geometric mean of the anharmonicities — an identity of the reduced model
that the measured 180 MHz coupling visibly violates, as the fit residual
shows.  The perturbative dispersive-shift formulas are validated against
exact diagonalization of the three-mode Hamiltonian; their comparison with
the measured shifts is reported under both detuning sign conventions
without asserting agreement.
"""

from stiraplab import device

params, residual = device.fit_circuit_params()
modes = device.reduce_circuit(params)
print("least-squares circuit fit to the measured mode parameters:")
print(f"  pad capacitance      {params.pad_capacitance_ff:7.2f} fF")
print(f"  coupling capacitance {params.coupling_capacitance_ff:7.2f} fF")
print(f"  Josephson energy     {params.josephson_energy_ghz:7.3f} GHz")
print(f"  residual             {residual:7.4f}  (the cross-Kerr identity "
      "g_zz = sqrt(alpha_b*alpha_d) cannot match the measured 180 MHz)")
print()

print(f"{'quantity':34s} {'model':>10s} {'measured':>10s}")
for row in device.device_report(params):
    print(f"{row['quantity']:34s} {row['model']:10.4f} {row['measured']:10.4f}")
print()

# exact-diagonalization cross-check of the perturbative shifts
mp = device.ModeParams(4.361, 4.792, 100.0, 130.0, 180.0, 100.0, 130.0)
delta_b = (4.361 - 7.205) * 1e3
print("perturbative dispersive shifts vs truncated exact diagonalization:")
for g in (20.0, 50.0, 150.0):
    oracle = device.exact_diagonalization_oracle(mp, g, 7.205, levels=6, cavity_levels=5)
    formula = device.dispersive_shifts(g, delta_b, 100.0, 180.0)
    print(f"  g = {g:5.1f} MHz: chi_b formula {formula.chi_bright_mhz:+.4f}, "
          f"numeric {oracle['chi_bright_mhz']:+.4f}; "
          f"chi_d formula {formula.chi_dark_mhz:+.4f}, numeric {oracle['chi_dark_mhz']:+.4f}")
