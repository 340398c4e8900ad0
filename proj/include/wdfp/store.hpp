#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wdfp/pipelines.hpp"

namespace wdfp {

inline constexpr std::uint16_t kStoreVersion = 1;

/// magic(4) version(2) method(1) m(4) J(1) wavelet(1) sigma_n2(8) length(8)
inline constexpr std::size_t kStoreHeaderBytes = 29;

/// Fingerprint as held on disk and by the batch harness: 32-bit payload.
struct StoredFingerprint {
  Method method = Method::Law;
  std::uint32_t source_size = 0;
  std::uint8_t levels = 0;
  TransformId transform = TransformId::Db4;
  double sigma_n2 = 0.0;
  std::vector<float> values;

  Fingerprint widen() const;
};

StoredFingerprint narrow(const Fingerprint& fp);

/// Little-endian header followed by `length` float32 values. Throws IoError.
void write_fingerprint(const Fingerprint& fp, const std::filesystem::path& path);
void write_fingerprint(const StoredFingerprint& fp, const std::filesystem::path& path);

/// Throws FileNotFound, BadMagic, UnsupportedVersion, CorruptHeader or
/// LengthMismatch.
StoredFingerprint read_stored_fingerprint(const std::filesystem::path& path);
Fingerprint read_fingerprint(const std::filesystem::path& path);

std::vector<std::uint8_t> serialize(const StoredFingerprint& fp);
StoredFingerprint deserialize(std::span<const std::uint8_t> bytes);

}  // namespace wdfp
