#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace sideband {

// Polynomial coupling function F(x, y) = sum c_mn x^m y^n, where x stands for
// the creation operator slot and y for the annihilation slot. Hermiticity of
// the operator it represents requires the coefficient list to be symmetric
// under (m, n) -> (n, m).
struct FSpec {
    struct Monomial {
        int m = 0;
        int n = 0;
        double coeff = 0.0;
    };
    std::vector<Monomial> monomials;

    // F = x*y  (number operator; radiation-pressure coupling)
    static FSpec number() { return FSpec{{{1, 1, 1.0}}}; }
    // F = x + y  (position coupling)
    static FSpec position() { return FSpec{{{1, 0, 1.0}, {0, 1, 1.0}}}; }

    bool is_hermitian(double tol = 1e-12) const {
        for (const auto& t : monomials) {
            double partner = 0.0;
            for (const auto& u : monomials)
                if (u.m == t.n && u.n == t.m) partner += u.coeff;
            if (std::abs(partner - t.coeff) > tol) return false;
        }
        return true;
    }
};

struct FValue {
    std::complex<double> value;
    std::complex<double> d_x;
    std::complex<double> d_y;
    std::complex<double> d_xy;
};

inline std::complex<double> ipow(std::complex<double> z, int k) {
    std::complex<double> r = 1.0;
    for (int i = 0; i < k; ++i) r *= z;
    return r;
}

// Value and first/mixed-second partials of F at (x, y); exact for polynomials.
inline FValue eval_f(const FSpec& spec, std::complex<double> x, std::complex<double> y) {
    FValue out{0.0, 0.0, 0.0, 0.0};
    for (const auto& t : spec.monomials) {
        const std::complex<double> xm = ipow(x, t.m);
        const std::complex<double> yn = ipow(y, t.n);
        out.value += t.coeff * xm * yn;
        if (t.m >= 1) out.d_x += t.coeff * double(t.m) * ipow(x, t.m - 1) * yn;
        if (t.n >= 1) out.d_y += t.coeff * double(t.n) * xm * ipow(y, t.n - 1);
        if (t.m >= 1 && t.n >= 1)
            out.d_xy += t.coeff * double(t.m) * double(t.n) * ipow(x, t.m - 1) * ipow(y, t.n - 1);
    }
    return out;
}

}  // namespace sideband
