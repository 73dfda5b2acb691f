#include "btl/errors.hpp"

namespace btl {

const char* error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::NotConnected: return "NotConnected";
        case ErrorCode::NotStronglyConnected: return "NotStronglyConnected";
        case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
        case ErrorCode::DivergentEstimate: return "DivergentEstimate";
        case ErrorCode::AllIterationsDiscarded: return "AllIterationsDiscarded";
    }
    return "UnknownError";
}

}  // namespace btl
