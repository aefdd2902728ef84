#pragma once

// Text and binary formats shared by the CLI and the tests.
//
//   semi-norm record   Q a11 a12 a22 | S m v1 ... vm
//   sampled map        header "n d target", then "i j x1 ... xd" per disc cell;
//                      target is euclidean | quadratic g11 ... gdd | polygonal S m v...
//   derivative field   header "n", then "i j <semi-norm record>" per disc cell
//   complex field      binary: double S, int64 n, n*n (re, im) pairs
//   qc map             binary: double S, int64 n, double K, then per node
//                      (mask, re, im, J00, J01, J10, J11)
//   csv grid           i,j,x,y,value
//
// Binary files use the host byte order. Parse failures throw InputError.

#include "qcr/beltrami.hpp"
#include "qcr/field.hpp"
#include "qcr/qcmap.hpp"
#include "qcr/seminorm.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qcr::io {

/// %.17g, so values round-trip exactly.
std::string fmt(double x);

std::string format_seminorm(const SemiNorm2& s);
SemiNorm2 parse_seminorm(std::string_view record);

std::string format_target(const TargetSpace& t);
TargetSpace parse_target(std::string_view descriptor, int dim);

void write_sampled_map(std::ostream& os, const SampledMap& u);
SampledMap read_sampled_map(std::istream& is);

void write_field(std::ostream& os, const DerivativeField& f);
DerivativeField read_field(std::istream& is);

void write_complex_field(std::ostream& os, const ComplexField& f);
ComplexField read_complex_field(std::istream& is);

void write_qcmap(std::ostream& os, const QCMap& f);
QCMap read_qcmap(std::istream& is);

/// One row per node where mask is nonzero (all nodes if mask is empty).
void write_csv(std::ostream& os, const SquareGrid& grid, const std::vector<double>& values,
               const std::vector<std::uint8_t>& mask = {});

// Path helpers; open failures throw InputError.
SampledMap load_sampled_map(const std::filesystem::path& p);
void save_sampled_map(const std::filesystem::path& p, const SampledMap& u);
ComplexField load_complex_field(const std::filesystem::path& p);
void save_complex_field(const std::filesystem::path& p, const ComplexField& f);
QCMap load_qcmap(const std::filesystem::path& p);
void save_qcmap(const std::filesystem::path& p, const QCMap& f);
void save_text(const std::filesystem::path& p, std::string_view text);

}  // namespace qcr::io
