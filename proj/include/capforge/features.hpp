#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace capforge {

// Encoder output for one image: L spatial locations by D channels.
struct FeatureGrid {
    std::string filename;
    Eigen::MatrixXd values; // L x D

    int locations() const { return static_cast<int>(values.rows()); }
    int channels() const { return static_cast<int>(values.cols()); }
};

class FeatureFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary container: magic "CAPF", u16 version, then per record
// u16 filename length + bytes, u16 L, u16 D, L*D little-endian float32 row-major.
void write_features(const std::vector<FeatureGrid>& grids, const std::string& path);
std::vector<FeatureGrid> load_features(const std::string& path);

// Deterministic stand-in grid for fixtures; (seed, filename) fixes every value.
FeatureGrid synthetic_grid(const std::string& filename, int locations, int channels,
                           uint64_t seed);

} // namespace capforge
