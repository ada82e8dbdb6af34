#pragma once

#include "otdf/gate.hpp"
#include "otdf/sequence.hpp"

namespace otdf {

struct SpacingScanResult {
    double mismatch_phase = 0.0;  // rad, deviation of theta_2 - theta_1 from 2 pi n
    double excitation = 0.0;      // final BM mean occupation, quanta
};

struct SpacingScanOptions {
    FockSpace space{};
    double rel_tol = 1e-10;
};

// On-resonance (mu = omega_BM) ODF pulse on |dd> from the motional ground
// state; returns the final <n_BM> as the red-sideband excitation proxy.
// Equal per-ion forces (mismatch 0) drive only the c.m., so the excitation
// vanishes there and is maximal at mismatch pi.
double spacing_excitation(double mismatch_phase, const GateConfig& config,
                          const SpacingScanOptions& opts = {});

// One-dimensional minimization of spacing_excitation over a bracket of trial
// corrections; returns the recovered mismatch (the negative of the optimal
// correction). Resolution ~1e-3 rad.
double calibrate_spacing(double bracket_lo, double bracket_hi, const GateConfig& config,
                         const SpacingScanOptions& opts = {});

// Population beat period of a single-beam Ramsey experiment with per-ion
// differential shift rates omega_1, omega_2: 2 pi / |omega_1 - omega_2|.
// Returns +infinity at balance.
double intensity_beat_period(double omega_1, double omega_2);

}  // namespace otdf
