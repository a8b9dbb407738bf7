// Deterministic text formatting and config hashing shared by the CLI and the
// CSV/JSON writers.
#include "qef/exports.hpp"

#include <cstdio>

namespace qef {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // Trim digits that do not affect round-tripping.
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(shorter, "%lf", &back);
        if (back == x) return std::string(shorter);
    }
    return s;
}

std::string format_complex(const std::complex<double>& z) {
    std::string s = format_double(z.real());
    double im = z.imag();
    if (im >= 0.0 || im != im) {
        s += "+";
        s += format_double(im);
    } else {
        s += format_double(im);
    }
    s += "i";
    return s;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash_hex(const std::string& text) {
    std::uint64_t h = fnv1a64(text.data(), text.size());
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string tool_version() {
#ifdef QEF_VERSION
    return QEF_VERSION;
#else
    return "0.0.0";
#endif
}

} // namespace qef
