#include "pbg/model.hpp"

#include <cmath>

namespace pbg {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonPositiveCoupling: return "NonPositiveCoupling";
    case ErrorCode::NonPositiveBandEdge: return "NonPositiveBandEdge";
    case ErrorCode::NonPositiveCavityFrequency: return "NonPositiveCavityFrequency";
    case ErrorCode::NegativeTemperature: return "NegativeTemperature";
    case ErrorCode::NonPositiveFrequency: return "NonPositiveFrequency";
    case ErrorCode::NonPositiveDelay: return "NonPositiveDelay";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::ZeroFluctuation: return "ZeroFluctuation";
    case ErrorCode::MaskGap: return "MaskGap";
    }
    return "UnknownError";
}

const char* to_string(Regime r) {
    switch (r) {
    case Regime::PBG: return "PBG";
    case Regime::PBE: return "PBE";
    case Regime::PB: return "PB";
    }
    return "?";
}

ModelParams validate(const ModelParams& p) {
    if (!(p.coupling > 0.0)) {
        fail(ErrorCode::NonPositiveCoupling, "coupling must be > 0");
    }
    const double scale = std::pow(p.coupling, 2.0 / 3.0);
    ModelParams out;
    out.coupling = 1.0;
    out.band_edge = p.band_edge / scale;
    out.detuning = p.detuning / scale;
    out.thermal_energy = p.thermal_energy / scale;
    if (!(out.band_edge > 0.0)) {
        fail(ErrorCode::NonPositiveBandEdge, "band edge must be > 0");
    }
    if (!(out.cavity_frequency() > 0.0)) {
        fail(ErrorCode::NonPositiveCavityFrequency, "band_edge + detuning must be > 0");
    }
    if (out.thermal_energy < 0.0) {
        fail(ErrorCode::NegativeTemperature, "thermal energy must be >= 0");
    }
    return out;
}

Regime classify_regime(const ModelParams& p) {
    const double scale = std::pow(p.coupling, 2.0 / 3.0);
    const double d = p.detuning / scale;
    if (d < -kRegimeBoundary) {
        return Regime::PBG;
    }
    if (d > kRegimeBoundary) {
        return Regime::PB;
    }
    return Regime::PBE;
}

} // namespace pbg
