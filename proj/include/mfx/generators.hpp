#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mfx {

enum class GeneratorKind {
    fgn,                      // fractional Gaussian noise, exact covariance
    fbm,                      // cumulative sum of fgn
    binomial_cascade,         // deterministic multiplicative measure
    correlated_gaussian_pair, // two unit-normal streams with correlation rho
    sinusoid_plus_noise       // white noise + A sin(2 pi k / period)
};

/// Kind-specific parameters. length must be a power of two >= 256; for the
/// cascade it must equal 2^depth. Identical specs produce bit-identical
/// output (mt19937_64 + Box-Muller, both fixed algorithms).
struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::fgn;
    double hurst = 0.5;       // fgn, fbm: H in (0,1)
    double multiplier = 0.75; // cascade: a in (0.5,1)
    int depth = 10;           // cascade levels
    double rho = 0.0;         // pair: correlation in (-1,1)
    double amplitude = 1.0;   // sinusoid
    double period = 64.0;     // sinusoid, in samples (>= 2)
    std::size_t length = 1024;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Single-output kinds (everything except correlated_gaussian_pair).
std::vector<double> generate(const GeneratorSpec& spec);

/// correlated_gaussian_pair only.
std::pair<std::vector<double>, std::vector<double>> generate_pair(const GeneratorSpec& spec);

/// Analytic generalized Hurst exponent of the binomial cascade:
///   h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2), continuous limit at q=0.
double cascade_h_analytic(double a, double q);

/// Analytic tau(q) = q h(q) - 1 = -ln(a^q + (1-a)^q)/ln 2.
double cascade_tau_analytic(double a, double q);

/// N(0,1) stream: mt19937_64 + Box-Muller, reproducible across standard
/// libraries. Tests and the pipeline draw from this same source.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mfx
