#pragma once

#include <cstdint>
#include <string>

#include "kslab/eigen.hpp"
#include "kslab/grid.hpp"

namespace kslab::io {

// Columnar text format: header `# variable=<gamma|zeta> n=<count>`, then
// `node,value` rows in full double precision.
void save_field(const RadialField& f, const std::string& path);
RadialField load_field(const std::string& path);

// FNV-1a 64-bit, used for manifest checksums and config hashes.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::uint64_t fnv1a(const std::string& s);
std::uint64_t fnv1a_file(const std::string& path);

// EigenPair export: <stem>.json manifest plus <stem>_phi.dat and
// <stem>_residual.dat in the columnar format. Returns the produced paths.
std::vector<std::string> save_eigenpair(const EigenPair& p, const std::string& dir,
                                        const std::string& stem);

} // namespace kslab::io
