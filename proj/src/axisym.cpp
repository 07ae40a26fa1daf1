#include "kslab/axisym.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "kslab/errors.hpp"

namespace kslab {

AxisymField::AxisymField(std::vector<double> r, std::vector<double> z, bool even)
    : r_nodes(std::move(r)), z_nodes(std::move(z)), even_in_z(even) {
    values.assign(r_nodes.size() * z_nodes.size(), 0.0);
}

namespace {
std::size_t bracket(const std::vector<double>& x, double v) {
    if (v < x.front() || v > x.back()) throw InterpolationOutOfDomain("axisym eval outside grid");
    auto it = std::upper_bound(x.begin(), x.end(), v);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    if (i == 0) return 0;
    if (i >= x.size()) return x.size() - 2;
    return i - 1;
}
} // namespace

double AxisymField::eval(double r, double z) const {
    const std::size_t i = bracket(r_nodes, r);
    const std::size_t j = bracket(z_nodes, z);
    const double tr = (r - r_nodes[i]) / (r_nodes[i + 1] - r_nodes[i]);
    const double tz = (z - z_nodes[j]) / (z_nodes[j + 1] - z_nodes[j]);
    return (1 - tr) * (1 - tz) * at(i, j) + tr * (1 - tz) * at(i + 1, j) +
           (1 - tr) * tz * at(i, j + 1) + tr * tz * at(i + 1, j + 1);
}

void AxisymField::check_even_symmetry(double tol) const {
    if (!even_in_z) return;
    for (std::size_t j = 0; j < nz(); ++j) {
        const double zj = z_nodes[j];
        auto it = std::find_if(z_nodes.begin(), z_nodes.end(),
                               [&](double z) { return std::abs(z + zj) < 1e-14 * (1.0 + std::abs(zj)); });
        if (it == z_nodes.end()) continue;
        const std::size_t jm = static_cast<std::size_t>(it - z_nodes.begin());
        for (std::size_t i = 0; i < nr(); ++i)
            if (std::abs(at(i, j) - at(i, jm)) > tol)
                throw RuntimeError("even-in-z symmetry violated");
    }
}

namespace {
void put_u64(std::ofstream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64(std::ofstream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(os, v);
}

double get_f64(std::ifstream& is) {
    const std::uint64_t v = get_u64(is);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}
} // namespace

void AxisymField::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RuntimeError("cannot open " + path + " for writing");
    os.write("KSAX", 4);
    put_u64(os, even_in_z ? 1 : 0);
    put_u64(os, r_nodes.size());
    for (double r : r_nodes) put_f64(os, r);
    put_u64(os, z_nodes.size());
    for (double z : z_nodes) put_f64(os, z);
    for (double v : values) put_f64(os, v);
    if (!os) throw RuntimeError("write failed for " + path);
}

AxisymField AxisymField::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw RuntimeError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::strncmp(magic, "KSAX", 4) != 0) throw RuntimeError("bad KSAX magic in " + path);
    AxisymField f;
    f.even_in_z = get_u64(is) != 0;
    f.r_nodes.resize(get_u64(is));
    for (double& r : f.r_nodes) r = get_f64(is);
    f.z_nodes.resize(get_u64(is));
    for (double& z : f.z_nodes) z = get_f64(is);
    f.values.resize(f.r_nodes.size() * f.z_nodes.size());
    for (double& v : f.values) v = get_f64(is);
    if (!is) throw RuntimeError("truncated KSAX file " + path);
    return f;
}

} // namespace kslab
