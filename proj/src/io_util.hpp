// Internal little-endian binary I/O helpers shared by the checkpoint and
// dataset formats. Not installed.
#ifndef TSADP_IO_UTIL_HPP
#define TSADP_IO_UTIL_HPP

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "tsadp/types.hpp"

namespace tsadp::io {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

inline std::uint32_t read_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) {
        throw FormatError(std::string("truncated file reading ") + what);
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& is, const char* what) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) {
        throw FormatError(std::string("truncated file reading ") + what);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& is, const char* what) {
    const std::uint64_t bits = read_u64(is, what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline void write_matrix(std::ostream& os, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) write_f64(os, m(i, j));
}

inline Matrix read_matrix(std::istream& is, Eigen::Index rows,
                          Eigen::Index cols, const char* what) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_f64(is, what);
    return m;
}

inline void expect_magic(std::istream& is, const char* magic,
                         const char* what) {
    char buf[4];
    if (!is.read(buf, 4)) {
        throw FormatError(std::string("truncated file reading ") + what +
                          " magic");
    }
    if (std::memcmp(buf, magic, 4) != 0) {
        throw FormatError(std::string("bad magic for ") + what +
                          ", expected \"" + magic + "\"");
    }
}

}  // namespace tsadp::io

#endif  // TSADP_IO_UTIL_HPP
