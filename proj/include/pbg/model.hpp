// model.hpp — Physical parameters, reduced units, and spectral-regime classification

#pragma once

#include "pbg/errors.hpp"

namespace pbg {

// All core routines work in reduced units: the coupling constant sets the
// scale, frequencies and energies carry units of coupling^(2/3) and times
// coupling^(-2/3).  validate() normalizes any input to coupling = 1.
struct ModelParams {
    double coupling = 1.0;        // reservoir coupling strength C (> 0)
    double band_edge = 100.0;     // band-edge frequency, units C^(2/3)
    double detuning = 0.0;        // cavity frequency minus band edge, units C^(2/3)
    double thermal_energy = 0.0;  // k_B T, units C^(2/3); 0 means a zero-temperature reservoir

    double cavity_frequency() const { return band_edge + detuning; }
};

// The regime boundary is approximate in origin, so it lives in one place.
inline constexpr double kRegimeBoundary = 2.5; // units C^(2/3)

enum class Regime { PBG, PBE, PB };

const char* to_string(Regime r);

// Normalizes to reduced units (coupling = 1) and checks invariants.
// Throws SimError with NonPositiveCoupling, NonPositiveBandEdge,
// NonPositiveCavityFrequency or NegativeTemperature.
ModelParams validate(const ModelParams& p);

// Pure function of detuning/coupling^(2/3); boundary values map to PBE.
Regime classify_regime(const ModelParams& p);

} // namespace pbg
