#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace qjump {

using cxd = std::complex<double>;

// Dense 3x3 complex matrix, row-major. Used as the three-level density
// matrix in the basis (g, r, s); also holds Lindblad RHS values.
struct Mat3c {
    std::array<cxd, 9> m{};

    cxd& operator()(int row, int col) { return m[static_cast<std::size_t>(3 * row + col)]; }
    const cxd& operator()(int row, int col) const {
        return m[static_cast<std::size_t>(3 * row + col)];
    }

    static Mat3c zero() { return Mat3c{}; }

    // |k><k| projector, k in {0,1,2}.
    static Mat3c projector(int k) {
        Mat3c r;
        r(k, k) = 1.0;
        return r;
    }

    cxd trace() const { return m[0] + m[4] + m[8]; }

    Mat3c& operator+=(const Mat3c& o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }

    friend Mat3c operator+(Mat3c a, const Mat3c& b) { return a += b; }

    friend Mat3c operator-(const Mat3c& a, const Mat3c& b) {
        Mat3c r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
        return r;
    }

    friend Mat3c operator*(const Mat3c& a, double s) {
        Mat3c r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] * s;
        return r;
    }

    friend Mat3c operator*(double s, const Mat3c& a) { return a * s; }

    bool finite() const {
        for (const auto& z : m)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

// max_jk |A_jk - conj(A_kj)|
inline double hermiticity_error(const Mat3c& a) {
    double e = 0.0;
    for (int j = 0; j < 3; ++j)
        for (int k = j; k < 3; ++k)
            e = std::max(e, std::abs(a(j, k) - std::conj(a(k, j))));
    return e;
}

// Frobenius norm.
inline double frobenius_norm(const Mat3c& a) {
    double s = 0.0;
    for (const auto& z : a.m) s += std::norm(z);
    return std::sqrt(s);
}

// Eigenvalues of a Hermitian 3x3 matrix, ascending, by the trigonometric
// closed form of the characteristic polynomial.
inline std::array<double, 3> hermitian_eigenvalues(const Mat3c& a) {
    double d0 = a(0, 0).real(), d1 = a(1, 1).real(), d2 = a(2, 2).real();
    double p1 = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
    std::array<double, 3> eig;
    if (p1 == 0.0) {
        eig = {d0, d1, d2};
    } else {
        double q = (d0 + d1 + d2) / 3.0;
        double p2 = (d0 - q) * (d0 - q) + (d1 - q) * (d1 - q) + (d2 - q) * (d2 - q) + 2.0 * p1;
        double p = std::sqrt(p2 / 6.0);
        // B = (A - q I) / p; r = det(B) / 2 is real for Hermitian A.
        auto b = [&](int j, int k) -> cxd {
            cxd v = a(j, k);
            if (j == k) v -= q;
            return v / p;
        };
        cxd det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                  b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                  b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        double r = det.real() / 2.0;
        r = std::clamp(r, -1.0, 1.0);
        double phi = std::acos(r) / 3.0;
        double e_max = q + 2.0 * p * std::cos(phi);
        double e_min = q + 2.0 * p * std::cos(phi + 2.0 * std::acos(-1.0) / 3.0);
        eig = {e_min, 3.0 * q - e_max - e_min, e_max};
    }
    if (eig[0] > eig[1]) std::swap(eig[0], eig[1]);
    if (eig[1] > eig[2]) std::swap(eig[1], eig[2]);
    if (eig[0] > eig[1]) std::swap(eig[0], eig[1]);
    return eig;
}

inline double min_eigenvalue(const Mat3c& a) { return hermitian_eigenvalues(a)[0]; }

} // namespace qjump
