#include "wdfp/error.hpp"

namespace wdfp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::CropTooLarge: return "CropTooLarge";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::UnknownWavelet: return "UnknownWavelet";
    case ErrorCode::InconsistentPyramid: return "InconsistentPyramid";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonSquareInput: return "NonSquareInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroNormFingerprint: return "ZeroNormFingerprint";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::CorruptHeader: return "CorruptHeader";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleCamera: return "SingleCamera";
  }
  return "Unknown";
}

}  // namespace wdfp
