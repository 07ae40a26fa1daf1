#pragma once

#include <string>
#include <vector>

namespace kslab {

// Tensor-grid samples u(r, z); row-major with r as the slow index.
struct AxisymField {
    std::vector<double> r_nodes;
    std::vector<double> z_nodes;
    std::vector<double> values;
    bool even_in_z = false;

    AxisymField() = default;
    AxisymField(std::vector<double> r, std::vector<double> z, bool even = false);

    std::size_t nr() const { return r_nodes.size(); }
    std::size_t nz() const { return z_nodes.size(); }
    double& at(std::size_t i, std::size_t j) { return values[i * z_nodes.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * z_nodes.size() + j]; }

    // Bilinear evaluation; throws InterpolationOutOfDomain outside the grid.
    double eval(double r, double z) const;

    void check_even_symmetry(double tol) const;

    // Binary container: magic "KSAX", two grid blocks, row-major value block,
    // little-endian 64-bit floats.
    void save(const std::string& path) const;
    static AxisymField load(const std::string& path);
};

} // namespace kslab
