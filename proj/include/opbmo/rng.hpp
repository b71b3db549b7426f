#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace opbmo {

/// splitmix64 finalizer, used to derive independent stream seeds from a user
/// seed plus a purpose tag so that e.g. symbol draws and sign draws never
/// share a stream.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    return mix64(mix64(seed) ^ mix64(purpose));
}

namespace stream_tag {
constexpr std::uint64_t symbol = 0x53594d42ULL;    // "SYMB"
constexpr std::uint64_t signs = 0x5349474eULL;     // "SIGN"
constexpr std::uint64_t witness = 0x57495453ULL;   // "WITS"
constexpr std::uint64_t power_it = 0x504f5752ULL;  // "POWR"
constexpr std::uint64_t test_fn = 0x54455354ULL;   // "TEST"
}  // namespace stream_tag

/// Deterministic Gaussian stream: mt19937_64 (bit-exact per the standard)
/// mapped to uniforms by the top 53 bits, turned into normals by Box-Muller.
/// std::normal_distribution is avoided on purpose: its algorithm is
/// implementation-defined and would break cross-platform reproducibility.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // in [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1<1 so safe
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Standard complex Gaussian, E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re * M_SQRT1_2, im * M_SQRT1_2};
    }

    /// One +-1 sign per call, from the top bit of the raw draw.
    int sign() { return (engine_() >> 63) ? -1 : 1; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace opbmo
