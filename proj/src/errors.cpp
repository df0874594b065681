#include "tariffgrid/errors.hpp"

namespace tariffgrid {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DisconnectedBus: return "DisconnectedBus";
    case ErrorCode::NoSlack: return "NoSlack";
    case ErrorCode::MultipleSlack: return "MultipleSlack";
    case ErrorCode::UnknownBus: return "UnknownBus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::NonpositiveVoltageParameter: return "NonpositiveVoltageParameter";
    case ErrorCode::OutOfRangeEnergy: return "OutOfRangeEnergy";
    case ErrorCode::NonconvexQuadratic: return "NonconvexQuadratic";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NoFeasiblePattern: return "NoFeasiblePattern";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace tariffgrid
