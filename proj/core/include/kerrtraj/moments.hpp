#pragma once

#include <optional>

#include "kerrtraj/params.hpp"

namespace kerrtraj {

/// Single-time observables of a state, in the X = (a + a^dag)/2,
/// P = (a - a^dag)/(2i) quadrature convention (vacuum var_x = var_p = 1/4).
/// g2 is absent (not zero) when mean_n vanishes.
struct StateMoments {
    double mean_n = 0.0;
    std::optional<double> g2;
    Complex mean_a{0.0, 0.0};
    double var_x = 0.25;
    double var_p = 0.25;
    double cov_xp = 0.0;
    /// Normally ordered fourth moment <a^dag a^dag a a>; kept alongside g2 so
    /// ensemble-level g2 can be aggregated without re-deriving it.
    double a4 = 0.0;
};

/// Helper shared by the solvers: fill g2/a4-derived fields from the raw
/// moments <n> and <a^dag a^dag a a>.
inline void set_g2(StateMoments& m, double mean_n, double a4) {
    m.mean_n = mean_n;
    m.a4 = a4;
    if (mean_n > 0.0) {
        m.g2 = a4 / (mean_n * mean_n);
    } else {
        m.g2.reset();
    }
}

} // namespace kerrtraj
