#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "otdf/gate.hpp"
#include "otdf/trajectory.hpp"

namespace otdf {

struct Rotation {
    double theta = 0.0;
    double phi = 0.0;
};

// One shaped ODF pulse; shape and strength come from GateConfig::pulse,
// phase_offset adds to the lattice phase.
struct OdfSegment {
    double phase_offset = 0.0;
};

// Free evolution. Optional per-ion static sigma^z shift rates model
// single-beam light shifts (H = sum_j shift_j/2 sigma^z_j).
struct Delay {
    double duration = 0.0;
    std::array<double, 2> shift{0.0, 0.0};
};

using SequenceSegment = std::variant<Rotation, OdfSegment, Delay>;

// Echoed Ramsey sequence of Fig.-1(b) form:
//   (1) pi/2 [phase 0] - (2) ODF - (3) pi [phase 0] - (4) ODF with echo
//   compensation - (5) pi/2 [phase pi] - optional (6) pi/2 analysis pulse.
// Rotations are instantaneous at the center of their time slots; the pi slot
// is config.echo_gap, the pi/2 slots are pi2_slot each. With the beams off
// the sequence takes |dd> to |uu> (P2 = 1). The analysis phase is measured
// from the y axis of pulses (1)/(3), which puts the parity maximum of an
// ideal Bell state at phi = pi/4.
std::vector<SequenceSegment> build_bell_sequence(const GateConfig& config, double pi2_slot,
                                                 std::optional<double> analysis_phi);

enum class Model {
    kAnalytic,  // exact LD-limit displacement/phase algebra per spin path
    kNumeric,   // full Schrodinger integration, non-LD effects included
};

struct RunOptions {
    Model model = Model::kAnalytic;
    int initial_spin = kDownDown;
    bool thermal = false;         // draw initial motion from the mode nbar values
    double weight_cutoff = 1e-6;  // truncation of the numeric thermal mixture
    FockSpace space{};
    double rel_tol = 1e-9;        // numeric integrator tolerance
    bool return_state = false;    // numeric, non-thermal only
};

struct SequenceResult {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    std::optional<CompositeState> final_state;
};

// Runs a segment schedule from a spin basis state. The analytic model
// requires sigma^z-diagonal segments between mixing rotations (the Fig.-1(b)
// family); arbitrary schedules run numerically.
SequenceResult run_sequence(const std::vector<SequenceSegment>& segments,
                            const GateConfig& config, const RunOptions& opts);

// Differential geometric phase between the even and odd parity subspaces
// accumulated over the echoed two-pulse gate; |chi| = pi/2 for a perfect
// Bell state. pi2_slot positions pulse (2) as in build_bell_sequence.
double entangling_phase(const GateConfig& config, double pi2_slot = 0.0);

// Peak coupling for which |chi| = pi/2 at the configured detuning.
double calibrate_amplitude(const GateConfig& config, double pi2_slot = 0.0);

struct ScanRow {
    double delta = 0.0;  // rad/s
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Populations after pulses (1)-(5) versus gate detuning, echo compensation
// reapplied per point.
std::vector<ScanRow> detuning_scan(const std::vector<double>& deltas, const GateConfig& config,
                                   double pi2_slot, const RunOptions& opts);

struct ParityRow {
    double phi = 0.0;
    double parity = 0.0;
};

std::vector<ParityRow> parity_scan(const std::vector<double>& phis, const GateConfig& config,
                                   double pi2_slot, const RunOptions& opts);

// Least-squares additive detuning offset between a measured scan table and
// the simulated populations.
double fit_detuning_offset(const std::vector<ScanRow>& measured, const GateConfig& config,
                           double pi2_slot, const RunOptions& opts);

}  // namespace otdf
