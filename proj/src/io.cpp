#include "kslab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "kslab/errors.hpp"

namespace kslab::io {

void save_field(const RadialField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw OutputUnwritable("cannot open " + path);
    out << "# variable=" << (f.grid.tag == Variable::soliton ? "gamma" : "zeta")
        << " n=" << f.size() << "\n";
    char buf[96];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.grid.nodes[i], f.values[i]);
        out << buf;
    }
}

RadialField load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeError("cannot open " + path);
    std::string header;
    std::getline(in, header);
    std::string var;
    std::size_t n = 0;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("variable=", 0) == 0) var = tok.substr(9);
            if (tok.rfind("n=", 0) == 0) n = std::stoul(tok.substr(2));
        }
    }
    if ((var != "gamma" && var != "zeta") || n == 0)
        throw RuntimeError("bad field header in " + path);
    RadialGrid g;
    g.tag = var == "gamma" ? Variable::soliton : Variable::parabolic;
    std::vector<double> v;
    g.nodes.reserve(n);
    v.reserve(n);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x, y;
        if (std::sscanf(line.c_str(), "%lg,%lg", &x, &y) != 2)
            throw RuntimeError("bad field row in " + path);
        g.nodes.push_back(x);
        v.push_back(y);
    }
    if (g.nodes.size() != n) throw RuntimeError("field row count mismatch in " + path);
    return RadialField(std::move(g), std::move(v));
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeError("cannot open " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const auto* p = reinterpret_cast<const unsigned char*>(buf);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

std::vector<std::string> save_eigenpair(const EigenPair& p, const std::string& dir,
                                        const std::string& stem) {
    const std::string base = dir + "/" + stem;
    std::vector<std::string> paths;
    save_field(p.phi, base + "_phi.dat");
    paths.push_back(base + "_phi.dat");
    save_field(p.residual, base + "_residual.dat");
    paths.push_back(base + "_residual.dat");

    nlohmann::json j;
    j["i"] = p.i;
    j["nu"] = p.nu;
    j["beta"] = p.beta;
    j["eigenvalue"] = p.eigenvalue;
    j["sup_gap"] = p.match.sup_gap;
    j["partial_mass_residual"] = p.partial_mass_residual;
    std::ofstream out(base + ".json");
    if (!out) throw OutputUnwritable("cannot open " + base + ".json");
    out << j.dump(2) << "\n";
    paths.push_back(base + ".json");
    return paths;
}

} // namespace kslab::io
