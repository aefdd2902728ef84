#include "qcr/io.hpp"

#include "qcr/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qcr::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InputError, what); }

double finite(double x, const char* what) {
  if (!std::isfinite(x)) bad(std::string("non-finite ") + what);
  return x;
}

// Whitespace tokens with strict numeric parsing.
class Tokens {
 public:
  explicit Tokens(std::string_view s) : in_(std::string(s)) {}

  bool done() {
    in_ >> std::ws;
    return in_.eof();
  }
  std::string word(const char* what) {
    std::string w;
    if (!(in_ >> w)) bad(std::string("missing ") + what);
    return w;
  }
  double number(const char* what) {
    const std::string w = word(what);
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(w, &used);
    } catch (const std::exception&) {
      bad(std::string("bad number for ") + what + ": '" + w + "'");
    }
    if (used != w.size()) bad(std::string("bad number for ") + what + ": '" + w + "'");
    return finite(x, what);
  }
  long integer(const char* what) {
    const std::string w = word(what);
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(w, &used);
    } catch (const std::exception&) {
      bad(std::string("bad integer for ") + what + ": '" + w + "'");
    }
    if (used != w.size()) bad(std::string("bad integer for ") + what + ": '" + w + "'");
    return v;
  }
  std::string rest() {
    std::string r;
    std::getline(in_ >> std::ws, r, '\0');
    return r;
  }

 private:
  std::istringstream in_;
};

// Next line that is neither blank nor a '#' comment.
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos && line[p] != '#') return true;
  }
  return false;
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) bad(std::string("truncated binary file at ") + what);
  return v;
}

SquareGrid read_grid_header(std::istream& is) {
  const double s = finite(get<double>(is, "header"), "half width");
  const auto n = get<std::int64_t>(is, "header");
  if (!(s > 0.0) || n < 1 || n > (1 << 16)) bad("invalid grid header");
  return {s, static_cast<int>(n)};
}

int read_cell_index(Tokens& t, int n, const char* what) {
  const long v = t.integer(what);
  if (v < 0 || v >= n) bad(std::string(what) + " index out of range");
  return static_cast<int>(v);
}

std::ifstream open_in(const std::filesystem::path& p, bool binary) {
  std::ifstream f(p, binary ? std::ios::binary : std::ios::in);
  if (!f) bad("cannot open '" + p.string() + "' for reading");
  return f;
}

std::ofstream open_out(const std::filesystem::path& p, bool binary) {
  std::ofstream f(p, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!f) bad("cannot open '" + p.string() + "' for writing");
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) bad("write to '" + p.string() + "' failed");
}

}  // namespace

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_seminorm(const SemiNorm2& s) {
  std::string out;
  if (s.is_quadratic()) {
    const Mat2& q = s.form();
    out = "Q " + fmt(q(0, 0)) + " " + fmt(q(0, 1)) + " " + fmt(q(1, 1));
  } else {
    out = "S " + std::to_string(s.directions());
    for (double v : s.values()) out += " " + fmt(v);
  }
  return out;
}

SemiNorm2 parse_seminorm(std::string_view record) {
  Tokens t(record);
  const std::string tag = t.word("semi-norm tag");
  SemiNorm2 s;
  if (tag == "Q") {
    Mat2 q;
    q(0, 0) = t.number("a11");
    q(0, 1) = q(1, 0) = t.number("a12");
    q(1, 1) = t.number("a22");
    s = SemiNorm2::quadratic(q);
  } else if (tag == "S") {
    const long m = t.integer("direction count");
    if (m < 3 || m > 1 << 16) bad("direction count out of range");
    std::vector<double> v(static_cast<std::size_t>(m));
    for (double& x : v) x = t.number("gauge value");
    s = SemiNorm2::sampled(std::move(v));
  } else {
    bad("unknown semi-norm tag '" + tag + "'");
  }
  if (!t.done()) bad("trailing tokens in semi-norm record");
  return s;
}

std::string format_target(const TargetSpace& t) {
  switch (t.kind()) {
    case TargetSpace::Kind::Euclidean:
      return "euclidean";
    case TargetSpace::Kind::QuadraticNorm: {
      std::string out = "quadratic";
      const auto& g = t.metric();
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) out += " " + fmt(g(i, j));
      return out;
    }
    case TargetSpace::Kind::PolygonalNorm:
      return "polygonal " + format_seminorm(t.gauge());
  }
  return {};
}

TargetSpace parse_target(std::string_view descriptor, int dim) {
  Tokens t(descriptor);
  const std::string kind = t.word("target kind");
  if (kind == "euclidean") {
    if (!t.done()) bad("trailing tokens after euclidean");
    return TargetSpace::euclidean(dim);
  }
  if (kind == "quadratic") {
    Eigen::MatrixXd g(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) g(i, j) = t.number("metric entry");
    if (!t.done()) bad("trailing tokens after quadratic metric");
    return TargetSpace::quadratic_norm(g);
  }
  if (kind == "polygonal") {
    if (dim != 2) bad("polygonal targets are planar");
    return TargetSpace::polygonal_norm(parse_seminorm(t.rest()));
  }
  bad("unknown target kind '" + kind + "'");
}

void write_sampled_map(std::ostream& os, const SampledMap& u) {
  os << u.grid.n() << ' ' << u.target.dim() << ' ' << format_target(u.target) << '\n';
  const SquareGrid& sq = u.grid.square();
  for (std::size_t k : u.grid.disc_cells()) {
    os << sq.col(k) << ' ' << sq.row(k);
    for (double x : u.at(k)) os << ' ' << fmt(x);
    os << '\n';
  }
}

SampledMap read_sampled_map(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) bad("empty sampled map");
  Tokens h(line);
  const long n = h.integer("grid size");
  const long d = h.integer("target dimension");
  if (n < 16 || n > 8192) bad("grid size out of range");
  if (d < 1 || d > 64) bad("target dimension out of range");
  const int dim = static_cast<int>(d);
  SampledMap u{DiscGrid(static_cast<int>(n)), parse_target(h.rest(), dim), {}};
  u.values.assign(u.grid.size() * static_cast<std::size_t>(dim), 0.0);
  std::vector<std::uint8_t> seen(u.grid.size(), 0);
  std::size_t count = 0;
  while (next_line(is, line)) {
    Tokens t(line);
    const int i = read_cell_index(t, u.grid.n(), "i");
    const int j = read_cell_index(t, u.grid.n(), "j");
    const std::size_t k = u.grid.square().index(i, j);
    if (!u.grid.in_disc(k)) bad("cell " + std::to_string(i) + " " + std::to_string(j) + " lies outside the disc");
    if (seen[k]) bad("duplicate cell " + std::to_string(i) + " " + std::to_string(j));
    seen[k] = 1;
    ++count;
    for (int c = 0; c < dim; ++c) u.values[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)] = t.number("coordinate");
    if (!t.done()) bad("trailing tokens in cell line");
  }
  if (count != u.grid.disc_cells().size()) {
    bad("sampled map covers " + std::to_string(count) + " of " + std::to_string(u.grid.disc_cells().size()) +
        " disc cells");
  }
  return u;
}

void write_field(std::ostream& os, const DerivativeField& f) {
  os << f.grid.n() << '\n';
  const SquareGrid& sq = f.grid.square();
  for (std::size_t k : f.grid.disc_cells()) {
    os << sq.col(k) << ' ' << sq.row(k) << ' ' << format_seminorm(f.at(k)) << '\n';
  }
}

DerivativeField read_field(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) bad("empty derivative field");
  Tokens h(line);
  const long n = h.integer("grid size");
  if (n < 16 || n > 8192 || !h.done()) bad("bad derivative field header");
  DerivativeField f{DiscGrid(static_cast<int>(n)), {}, {}};
  f.seminorms.assign(f.grid.size(), SemiNorm2());
  f.estimated.assign(f.grid.size(), 0);
  std::size_t count = 0;
  while (next_line(is, line)) {
    Tokens t(line);
    const int i = read_cell_index(t, f.grid.n(), "i");
    const int j = read_cell_index(t, f.grid.n(), "j");
    const std::size_t k = f.grid.square().index(i, j);
    if (!f.grid.in_disc(k) || f.estimated[k]) bad("cell outside the disc or repeated");
    f.seminorms[k] = parse_seminorm(t.rest());
    f.estimated[k] = 1;
    ++count;
  }
  if (count != f.grid.disc_cells().size()) bad("derivative field does not cover the disc");
  return f;
}

void write_complex_field(std::ostream& os, const ComplexField& f) {
  put(os, f.grid.half_width);
  put(os, static_cast<std::int64_t>(f.grid.n));
  for (const cplx& v : f.values) {
    put(os, v.real());
    put(os, v.imag());
  }
}

ComplexField read_complex_field(std::istream& is) {
  ComplexField f = ComplexField::zeros(read_grid_header(is));
  for (cplx& v : f.values) {
    const double re = get<double>(is, "values");
    const double im = get<double>(is, "values");
    v = {finite(re, "coefficient"), finite(im, "coefficient")};
  }
  if (is.peek() != std::char_traits<char>::eof()) bad("trailing bytes in complex field");
  return f;
}

void write_qcmap(std::ostream& os, const QCMap& f) {
  put(os, f.grid.half_width);
  put(os, static_cast<std::int64_t>(f.grid.n));
  put(os, f.k_certified);
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    const Mat2& j = f.jacobians[k];
    for (double x : {f.valid(k) ? 1.0 : 0.0, f.values[k].real(), f.values[k].imag(), j(0, 0), j(0, 1), j(1, 0), j(1, 1)})
      put(os, x);
  }
}

QCMap read_qcmap(std::istream& is) {
  QCMap f;
  f.grid = read_grid_header(is);
  f.k_certified = get<double>(is, "header");
  const std::size_t sz = f.grid.size();
  f.mask.assign(sz, 0);
  f.values.assign(sz, cplx());
  f.jacobians.assign(sz, Mat2::Zero());
  for (std::size_t k = 0; k < sz; ++k) {
    double r[7];
    for (double& x : r) x = get<double>(is, "node record");
    if (r[0] != 0.0 && r[0] != 1.0) bad("mask entries must be 0 or 1");
    f.mask[k] = r[0] == 1.0;
    f.values[k] = {r[1], r[2]};
    f.jacobians[k] << r[3], r[4], r[5], r[6];
  }
  if (is.peek() != std::char_traits<char>::eof()) bad("trailing bytes in qc map");
  return f;
}

void write_csv(std::ostream& os, const SquareGrid& grid, const std::vector<double>& values,
               const std::vector<std::uint8_t>& mask) {
  if (values.size() != grid.size()) bad("csv values do not match the grid");
  os << "i,j,x,y,value\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!mask.empty() && !mask[k]) continue;
    const Vec2 p = grid.node(k);
    os << grid.col(k) << ',' << grid.row(k) << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(values[k]) << '\n';
  }
}

SampledMap load_sampled_map(const std::filesystem::path& p) {
  auto f = open_in(p, false);
  return read_sampled_map(f);
}

void save_sampled_map(const std::filesystem::path& p, const SampledMap& u) {
  auto f = open_out(p, false);
  write_sampled_map(f, u);
  finish(f, p);
}

ComplexField load_complex_field(const std::filesystem::path& p) {
  auto f = open_in(p, true);
  return read_complex_field(f);
}

void save_complex_field(const std::filesystem::path& p, const ComplexField& c) {
  auto f = open_out(p, true);
  write_complex_field(f, c);
  finish(f, p);
}

QCMap load_qcmap(const std::filesystem::path& p) {
  auto f = open_in(p, true);
  return read_qcmap(f);
}

void save_qcmap(const std::filesystem::path& p, const QCMap& m) {
  auto f = open_out(p, true);
  write_qcmap(f, m);
  finish(f, p);
}

void save_text(const std::filesystem::path& p, std::string_view text) {
  auto f = open_out(p, false);
  f << text;
  finish(f, p);
}

}  // namespace qcr::io
