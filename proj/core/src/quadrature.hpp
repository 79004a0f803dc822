#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace kinetic::detail {

struct Rule1D {
    std::vector<double> x, w;  // on [-1, 1]
};

template <unsigned N>
Rule1D make_gauss() {
    using G = boost::math::quadrature::gauss<double, N>;
    Rule1D r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            r.x.push_back(0.0);
            r.w.push_back(w[i]);
        } else {
            r.x.push_back(-a[i]);
            r.w.push_back(w[i]);
            r.x.push_back(a[i]);
            r.w.push_back(w[i]);
        }
    }
    return r;
}

inline const Rule1D& gauss_legendre(int n) {
    static const Rule1D r4 = make_gauss<4>(), r6 = make_gauss<6>(), r8 = make_gauss<8>(),
                        r12 = make_gauss<12>(), r16 = make_gauss<16>(), r20 = make_gauss<20>(),
                        r24 = make_gauss<24>(), r32 = make_gauss<32>(), r40 = make_gauss<40>(),
                        r48 = make_gauss<48>(), r64 = make_gauss<64>();
    switch (n) {
        case 4: return r4;
        case 6: return r6;
        case 8: return r8;
        case 12: return r12;
        case 16: return r16;
        case 20: return r20;
        case 24: return r24;
        case 32: return r32;
        case 40: return r40;
        case 48: return r48;
        case 64: return r64;
        default: throw std::invalid_argument("gauss_legendre: unsupported order");
    }
}

} // namespace kinetic::detail
