#include "revival/fingerprint.hpp"

#include <cmath>
#include <cstdio>

namespace revival {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string provenance_line(std::uint64_t config_hash) {
  std::string out = "# ";
  out += kToolName;
  out += ' ';
  out += kToolVersion;
  out += " config=";
  out += hex64(config_hash);
  return out;
}

}  // namespace revival
