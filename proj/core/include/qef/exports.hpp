// exports.hpp: deterministic formatting helpers shared by the CSV/JSON
// writers and the CLI (fixed column orders, config hashing, version stamps).
#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace qef {

// Shortest round-trip decimal formatting (printf %.17g trimmed); identical
// input bits always produce identical bytes, which the output determinism
// contract relies on.
std::string format_double(double v);
std::string format_complex(const std::complex<double>& v); // "re+imi" style

// FNV-1a 64-bit over the raw config bytes; embedded in every output file.
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash_hex(const std::string& config_bytes);

std::string tool_version(); // QEF_VERSION

} // namespace qef
