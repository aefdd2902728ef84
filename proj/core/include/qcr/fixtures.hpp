#pragma once

// Canonical test maps and coefficients, shared by the CLI fixture generator
// and the acceptance suite.

#include "qcr/beltrami.hpp"
#include "qcr/field.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qcr::fixtures {

/// u(z) = z into Euclidean R^2.
SampledMap identity(int n);
/// u(x, y) = (2x, y) into Euclidean R^2.
SampledMap stretch(int n);
/// u(z) = z into R^2 normed by the sampled l-infinity gauge.
SampledMap linf_identity(int n, int directions = kDefaultDirections);
/// A random orientation preserving linear map after a smooth perturbation of
/// the identity whose differential stays within 1/2 of I.
SampledMap random_diffeo(int n, std::uint64_t seed);
/// The saddle graph (x, y, (x^2 - y^2)/2) in Euclidean R^3.
SampledMap saddle_graph(int n);

/// k * b(|z| / radius) with the bump b(r) = exp(1 - 1/(1 - r^2)), b(0) = 1.
ComplexField bump_coefficient(const SquareGrid& grid, double k, double radius = 0.8);

/// Sampled-map fixture by name; throws InputError for unknown names.
SampledMap map_by_name(const std::string& name, int n, std::uint64_t seed);
std::vector<std::string> map_names();

}  // namespace qcr::fixtures
