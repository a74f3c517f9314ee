#include "afp/raster.hpp"

#include <cmath>

namespace afp {

DepthMap::DepthMap(Raster<double> pixels) : pixels_(std::move(pixels)) {
    for (double v : pixels_.values()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("depth map intensity outside [0,1]: " + std::to_string(v));
        }
    }
}

const char* to_string(Polarity p) noexcept {
    switch (p) {
        case Polarity::upper: return "upper";
        case Polarity::lower: return "lower";
        case Polarity::none: break;
    }
    return "none";
}

const char* to_string(DefectClass c) noexcept {
    switch (c) {
        case DefectClass::gap: return "gap";
        case DefectClass::overlap: return "overlap";
        case DefectClass::neutral: break;
    }
    return "neutral";
}

Polarity polarity_from_string(const std::string& s) {
    if (s == "upper") return Polarity::upper;
    if (s == "lower") return Polarity::lower;
    if (s == "none") return Polarity::none;
    throw std::invalid_argument("unknown polarity '" + s + "'");
}

}  // namespace afp
