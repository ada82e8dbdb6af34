#pragma once

#include "otdf/budget.hpp"
#include "otdf/gate.hpp"
#include "otdf/stats.hpp"

namespace otdf {

// The "ca40-2021" preset: a two-ion 40Ca+ optical-qubit gate driven by a
// 532 nm moving lattice with 90-degree beam geometry.
//   omega_cm = 2 pi x 2.53 MHz, omega_bm = 2 pi x 4.38 MHz
//   eta_cm = 0.083, eta_bm = 0.063, nbar = 0.1 both modes
//   heat rates: c.m. 33 /s, BM 1.4 /s
//   delta = 2 pi x 114 kHz, tau_ODF = 12 us with 3.2 us sine^2 ramps, K = 2
//   pi/2 = 2.8 us, pi = 5.6 us (35.2 us Bell sequence total)
// omega_peak defaults to the value calibrated for |chi| = pi/2 at the preset
// detuning. Detection means (k0, k1, k2) = (60, 30, 1) are tooling defaults,
// not measured values.
namespace presets {

GateConfig ca40_2021_gate();

// Duration reserved for each pi/2 pulse in the Bell sequence.
double ca40_2021_pi2_slot();

MixtureModel ca40_2021_mixture();

// Table-style budget inputs: measured infidelity 5.7e-4, Delta omega / 2 pi
// = 63 Hz, 1.174 s D-state lifetime, 200 us detection.
BudgetInputs ca40_2021_budget();

}  // namespace presets

}  // namespace otdf
