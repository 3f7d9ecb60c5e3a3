#include "platoon/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "platoon/error.hpp"
#include "platoon/measurement_csv.hpp"
#include "platoon/records.hpp"

namespace platoon {

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1)
    fail(ErrorKind::Io, "SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text_file(path)); }

std::string digest_of(const VehicleSpec& spec) { return sha256_hex(format_records({to_record(spec)})); }
std::string digest_of(const DragModel& model) { return sha256_hex(format_records({to_record(model)})); }
std::string digest_of(const MeasurementSeries& series) { return sha256_hex(format_measurement_csv(series)); }

}  // namespace platoon
