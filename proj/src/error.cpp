#include "pivlp/error.hpp"

namespace pivlp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LagOutOfRange: return "LagOutOfRange";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::SingularToeplitz: return "SingularToeplitz";
        case ErrorCode::PathSingular: return "PathSingular";
        case ErrorCode::DegenerateNormalizer: return "DegenerateNormalizer";
        case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
        case ErrorCode::AlphaNotTabulated: return "AlphaNotTabulated";
        case ErrorCode::SchemaMismatch: return "SchemaMismatch";
        case ErrorCode::NonStationarySpec: return "NonStationarySpec";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace pivlp
