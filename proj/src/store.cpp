#include "wdfp/store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace wdfp {
namespace {

static_assert(std::endian::native == std::endian::little,
              "fingerprint files are written by memcpy on little-endian hosts");

constexpr char kMagic[4] = {'W', 'D', 'F', 'P'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) {
      throw Error(ErrorCode::CorruptHeader, "file shorter than the fixed header");
    }
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::uint8_t* cursor() const { return bytes_.data() + pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Fingerprint StoredFingerprint::widen() const {
  Fingerprint fp;
  fp.method = method;
  fp.values.assign(values.begin(), values.end());
  fp.source_size = source_size;
  fp.levels = levels;
  fp.transform = transform;
  fp.sigma_n2 = sigma_n2;
  return fp;
}

StoredFingerprint narrow(const Fingerprint& fp) {
  StoredFingerprint s;
  s.method = fp.method;
  s.source_size = fp.source_size;
  s.levels = fp.levels;
  s.transform = fp.transform;
  s.sigma_n2 = fp.sigma_n2;
  s.values.reserve(fp.values.size());
  for (double v : fp.values) s.values.push_back(static_cast<float>(v));
  return s;
}

std::vector<std::uint8_t> serialize(const StoredFingerprint& fp) {
  std::vector<std::uint8_t> out;
  out.reserve(kStoreHeaderBytes + 4 * fp.values.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put(out, kStoreVersion);
  put(out, static_cast<std::uint8_t>(fp.method));
  put(out, fp.source_size);
  put(out, fp.levels);
  put(out, static_cast<std::uint8_t>(fp.transform));
  put(out, fp.sigma_n2);
  put(out, static_cast<std::uint64_t>(fp.values.size()));
  const auto* payload = reinterpret_cast<const std::uint8_t*>(fp.values.data());
  out.insert(out.end(), payload, payload + 4 * fp.values.size());
  return out;
}

StoredFingerprint deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::BadMagic, "not a fingerprint file");
  }
  Reader in(bytes);
  in.get<std::uint32_t>();
  if (const auto version = in.get<std::uint16_t>(); version != kStoreVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "format version " + std::to_string(version));
  }
  StoredFingerprint fp;
  const auto method = method_from_id(in.get<std::uint8_t>());
  if (!method) throw Error(ErrorCode::CorruptHeader, "unknown method id");
  fp.method = *method;
  fp.source_size = in.get<std::uint32_t>();
  fp.levels = in.get<std::uint8_t>();
  const auto transform = in.get<std::uint8_t>();
  if (transform > 1) throw Error(ErrorCode::CorruptHeader, "unknown wavelet id");
  fp.transform = static_cast<TransformId>(transform);
  fp.sigma_n2 = in.get<double>();
  const auto length = in.get<std::uint64_t>();

  std::size_t expected = 0;
  try {
    expected = expected_length(fp.method, fp.source_size, fp.levels);
  } catch (const Error&) {
    throw Error(ErrorCode::LengthMismatch, "m and J admit no valid fingerprint length");
  }
  if (length != expected) {
    throw Error(ErrorCode::LengthMismatch, "declared length " + std::to_string(length) +
                                               ", formula gives " + std::to_string(expected));
  }
  if (in.remaining() != 4 * length) {
    throw Error(ErrorCode::LengthMismatch, "payload holds " + std::to_string(in.remaining()) +
                                               " bytes, header declares " +
                                               std::to_string(4 * length));
  }
  fp.values.resize(length);
  std::memcpy(fp.values.data(), in.cursor(), 4 * length);
  for (float v : fp.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::CorruptHeader, "non-finite payload value");
  }
  return fp;
}

void write_fingerprint(const StoredFingerprint& fp, const std::filesystem::path& path) {
  const auto bytes = serialize(fp);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_fingerprint(const Fingerprint& fp, const std::filesystem::path& path) {
  write_fingerprint(narrow(fp), path);
}

StoredFingerprint read_stored_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return deserialize(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

Fingerprint read_fingerprint(const std::filesystem::path& path) {
  return read_stored_fingerprint(path).widen();
}

}  // namespace wdfp
