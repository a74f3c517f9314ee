#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace afp {

/// Pixel coordinate. Columns grow to the right, rows grow downward.
struct Pixel {
    int col = 0;
    int row = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Row-major 2D grid. Dimensions are fixed at construction.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("raster dimensions must be positive, got " +
                                        std::to_string(width) + "x" + std::to_string(height));
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width < 1 || height < 1) {
            throw std::invalid_argument("raster dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw std::invalid_argument("raster data size does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int col, int row) const noexcept {
        return col >= 0 && row >= 0 && col < width_ && row < height_;
    }

    T& at(int col, int row) { return data_[index(col, row)]; }
    const T& at(int col, int row) const { return data_[index(col, row)]; }

    /// Edge-replicating accessor.
    const T& clamped(int col, int row) const {
        col = col < 0 ? 0 : (col >= width_ ? width_ - 1 : col);
        row = row < 0 ? 0 : (row >= height_ ? height_ - 1 : row);
        return data_[index(col, row)];
    }

    std::span<const T> values() const noexcept { return data_; }
    std::span<T> values() noexcept { return data_; }

    template <typename U>
    bool same_shape(const Raster<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t index(int col, int row) const noexcept {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
    }
}

/// Height-encoded scan with intensities normalized to [0,1].
class DepthMap {
public:
    DepthMap() = default;
    explicit DepthMap(Raster<double> pixels);
    DepthMap(int width, int height, std::vector<double> values)
        : DepthMap(Raster<double>(width, height, std::move(values))) {}

    int width() const noexcept { return pixels_.width(); }
    int height() const noexcept { return pixels_.height(); }
    double at(int col, int row) const { return pixels_.at(col, row); }
    double clamped(int col, int row) const { return pixels_.clamped(col, row); }
    const Raster<double>& raster() const noexcept { return pixels_; }
    std::span<const double> values() const noexcept { return pixels_.values(); }

    friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
    Raster<double> pixels_;
};

using BinaryMask = Raster<std::uint8_t>;
using SignedGradientMap = Raster<double>;

enum class Polarity : std::uint8_t { none = 0, upper = 1, lower = 2 };

using PolarEdgeMap = Raster<Polarity>;

/// Label codes are an external contract (label PNGs store them verbatim).
enum class DefectClass : std::uint8_t { neutral = 0, gap = 1, overlap = 2 };

using DefectMask = Raster<DefectClass>;

const char* to_string(Polarity p) noexcept;
const char* to_string(DefectClass c) noexcept;
Polarity polarity_from_string(const std::string& s);

/// A boundary sampled at every column of its extent (used for reference curves).
struct BoundaryCurve {
    Polarity polarity = Polarity::none;
    int tow = 0;
    int first_col = 0;
    std::vector<double> rows;
};

/// Raised for unreadable/unwritable files and malformed file contents.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace afp
