#include "mfx/generators.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>

#include "mfx/errors.hpp"
#include "mfx/util.hpp"

namespace mfx {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

void fft_forward(std::vector<std::complex<double>>& data) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                                reinterpret_cast<fftw_complex*>(data.data()),
                                reinterpret_cast<fftw_complex*>(data.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
}

/// fGn autocovariance at lag k for unit-variance noise.
double fgn_autocov(double hurst, std::size_t k) {
    const double h2 = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    if (k == 0) return 1.0;
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

/// Davies-Harte circulant embedding: the covariance circulant of size 2N is
/// diagonalized by the DFT; Gaussian weights with Hermitian symmetry give a
/// sample with the exact target covariance.
std::vector<double> generate_fgn(double hurst, std::size_t n, std::uint64_t seed) {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> buf(m);
    for (std::size_t k = 0; k <= n; ++k) buf[k] = fgn_autocov(hurst, k);
    for (std::size_t k = 1; k < n; ++k) buf[m - k] = buf[k];
    fft_forward(buf);

    std::vector<double> lambda(m);
    double lmax = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        lambda[k] = buf[k].real();
        lmax = std::max(lmax, lambda[k]);
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (lambda[k] < 0.0) {
            if (lambda[k] < -1e-8 * lmax)
                throw std::runtime_error("circulant embedding produced a negative eigenvalue");
            lambda[k] = 0.0;
        }
    }

    GaussianStream g(seed);
    buf[0] = std::sqrt(lambda[0]) * g.next();
    buf[n] = std::sqrt(lambda[n]) * g.next();
    for (std::size_t k = 1; k < n; ++k) {
        const double w = std::sqrt(0.5 * lambda[k]);
        const double re = w * g.next();
        const double im = w * g.next();
        buf[k] = {re, im};
        buf[m - k] = {re, -im};
    }
    fft_forward(buf);

    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k].real() * scale;
    return out;
}

std::vector<double> generate_cascade(double a, int depth) {
    const std::size_t n = std::size_t{1} << depth;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const int ones = static_cast<int>(std::popcount(k));
        out[k] = std::pow(a, depth - ones) * std::pow(1.0 - a, ones);
    }
    return out;
}

} // namespace

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // 53-bit mantissa draws mapped into (0,1)
    const double u1 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
}

void GeneratorSpec::validate() const {
    if (!is_pow2(length) || length < 256)
        throw std::invalid_argument("generator: length must be a power of two >= 256");
    switch (kind) {
        case GeneratorKind::fgn:
        case GeneratorKind::fbm:
            if (!(hurst > 0.0 && hurst < 1.0))
                throw std::invalid_argument("generator: hurst must be in (0,1)");
            break;
        case GeneratorKind::binomial_cascade:
            if (!(multiplier > 0.5 && multiplier < 1.0))
                throw std::invalid_argument("generator: cascade multiplier must be in (0.5,1)");
            if (depth < 8 || depth > 30)
                throw std::invalid_argument("generator: cascade depth must be in 8..30");
            if (length != (std::size_t{1} << depth))
                throw std::invalid_argument("generator: cascade length must equal 2^depth");
            break;
        case GeneratorKind::correlated_gaussian_pair:
            if (!(rho > -1.0 && rho < 1.0))
                throw std::invalid_argument("generator: rho must be in (-1,1)");
            break;
        case GeneratorKind::sinusoid_plus_noise:
            if (!(amplitude > 0.0))
                throw std::invalid_argument("generator: amplitude must be positive");
            if (!(period >= 2.0))
                throw std::invalid_argument("generator: period must be >= 2 samples");
            break;
    }
}

std::vector<double> generate(const GeneratorSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case GeneratorKind::fgn:
            return generate_fgn(spec.hurst, spec.length, spec.seed);
        case GeneratorKind::fbm: {
            auto noise = generate_fgn(spec.hurst, spec.length, spec.seed);
            double acc = 0.0;
            for (double& v : noise) {
                acc += v;
                v = acc;
            }
            return noise;
        }
        case GeneratorKind::binomial_cascade:
            return generate_cascade(spec.multiplier, spec.depth);
        case GeneratorKind::sinusoid_plus_noise: {
            GaussianStream g(spec.seed);
            std::vector<double> out(spec.length);
            for (std::size_t k = 0; k < spec.length; ++k)
                out[k] = g.next() + spec.amplitude * std::sin(kTwoPi * k / spec.period);
            return out;
        }
        case GeneratorKind::correlated_gaussian_pair:
            throw std::invalid_argument("generate: correlated pair requires generate_pair");
    }
    throw std::invalid_argument("generate: unknown kind");
}

std::pair<std::vector<double>, std::vector<double>> generate_pair(const GeneratorSpec& spec) {
    spec.validate();
    if (spec.kind != GeneratorKind::correlated_gaussian_pair)
        throw std::invalid_argument("generate_pair: kind must be correlated_gaussian_pair");
    GaussianStream g(spec.seed);
    std::vector<double> x(spec.length), y(spec.length);
    const double c = std::sqrt(1.0 - spec.rho * spec.rho);
    for (std::size_t k = 0; k < spec.length; ++k) {
        const double z1 = g.next();
        const double z2 = g.next();
        x[k] = z1;
        y[k] = spec.rho * z1 + c * z2;
    }
    return {std::move(x), std::move(y)};
}

double cascade_h_analytic(double a, double q) {
    const double b = 1.0 - a;
    if (q == 0.0) return -(std::log(a) + std::log(b)) / (2.0 * std::log(2.0));
    return 1.0 / q - std::log(std::pow(a, q) + std::pow(b, q)) / (q * std::log(2.0));
}

double cascade_tau_analytic(double a, double q) {
    return -std::log(std::pow(a, q) + std::pow(1.0 - a, q)) / std::log(2.0);
}

} // namespace mfx
