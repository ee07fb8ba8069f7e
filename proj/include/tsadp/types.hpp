#ifndef TSADP_TYPES_HPP
#define TSADP_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsadp {

// All numerics are double precision. Gradient checking against central
// differences at 1e-5 relative tolerance is not feasible in float32.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands.
struct ShapeError : Error {
    using Error::Error;
};

/// Out-of-range index (frame index, mask index).
struct IndexError : Error {
    using Error::Error;
};

/// Invalid configuration or violated precondition.
struct ValidationError : Error {
    using Error::Error;
};

/// Filesystem-level failure (unreadable, unwritable).
struct IoError : Error {
    using Error::Error;
};

/// Malformed binary file (bad magic, version, truncation).
struct FormatError : Error {
    using Error::Error;
};

inline std::string shape_str(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

/// Deterministic RNG. Wraps mt19937_64 with explicitly-coded uniform and
/// gaussian transforms so streams are reproducible independent of the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 bits of entropy.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Consumes two draws per call.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Stream splitter so independent random streams can be derived from one
/// seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace tsadp

#endif  // TSADP_TYPES_HPP
