#include "kerrtraj/params.hpp"

#include <cmath>
#include <sstream>

namespace kerrtraj {

const char* to_string(Unraveling u) {
    switch (u) {
        case Unraveling::PhotonCounting: return "pc";
        case Unraveling::Heterodyne: return "het";
        case Unraveling::HomodyneX: return "homx";
    }
    return "?";
}

void KerrParams::validate() const {
    std::ostringstream err;
    if (!(gamma > 0.0)) {
        err << "gamma must be positive, got " << gamma;
    } else if (gamma_x < 0.0 || gamma_p < 0.0) {
        err << "gamma_x and gamma_p must be nonnegative, got " << gamma_x << ", " << gamma_p;
    } else if (gamma_x + gamma_p != gamma) {
        err << "gamma_x + gamma_p must equal gamma exactly, got " << gamma_x + gamma_p
            << " vs " << gamma;
    } else if (!std::isfinite(delta) || !std::isfinite(u) || !std::isfinite(f.real()) ||
               !std::isfinite(f.imag())) {
        err << "non-finite parameter";
    } else {
        return;
    }
    throw ConfigError("KerrParams: " + err.str());
}

} // namespace kerrtraj
