#include "gaugetrace/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

namespace {

constexpr const char* kMagic = "gaugetrace-grid";
constexpr int kVersion = 1;

struct Header {
  std::string kind;
  int dim = 0;
  int fiber = 0;
  std::vector<std::vector<double>> axes;
  std::size_t values = 0;
};

void write_payload(const std::string& path, const Header& h, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  std::ostringstream head;
  head.precision(17);
  head << kMagic << ' ' << kVersion << '\n'
       << "kind " << h.kind << '\n'
       << "dim " << h.dim << '\n'
       << "fiber " << h.fiber << '\n';
  for (const auto& axis : h.axes) {
    head << "axis " << axis.size();
    for (double x : axis) head << ' ' << x;
    head << '\n';
  }
  head << "values " << values.size() << '\n' << "end\n";
  out << head.str();
  for (double v : values) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

std::vector<double> read_payload(const std::string& path, Header& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::string line;
  int version = 0;
  {
    std::getline(in, line);
    std::istringstream ls(line);
    std::string magic;
    ls >> magic >> version;
    if (magic != kMagic || version != kVersion) fail(ErrorKind::IoError, "'" + path + "' is not a grid dump");
  }
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "kind") {
      ls >> h.kind;
    } else if (key == "dim") {
      ls >> h.dim;
    } else if (key == "fiber") {
      ls >> h.fiber;
    } else if (key == "axis") {
      std::size_t count = 0;
      ls >> count;
      std::vector<double> axis(count);
      for (auto& x : axis) ls >> x;
      h.axes.push_back(std::move(axis));
    } else if (key == "values") {
      ls >> h.values;
    } else {
      fail(ErrorKind::IoError, "unknown header key '" + key + "' in '" + path + "'");
    }
    if (ls.fail()) fail(ErrorKind::IoError, "malformed header line '" + line + "' in '" + path + "'");
  }
  if (line != "end") fail(ErrorKind::IoError, "header of '" + path + "' is not terminated");
  if (static_cast<int>(h.axes.size()) != h.dim) fail(ErrorKind::IoError, "axis count does not match dim");
  std::vector<double> values(h.values);
  for (auto& v : values) {
    char bytes[8];
    in.read(bytes, 8);
    if (!in) fail(ErrorKind::IoError, "'" + path + "' is truncated");
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v = std::bit_cast<double>(bits);
  }
  return values;
}

}  // namespace

void write_field(const std::string& path, const Field& field) {
  if (!field.is_sampled()) fail(ErrorKind::UnsupportedField, "only sampled fields can be dumped");
  const Field& sampled = field;
  Header h;
  h.kind = "field";
  h.dim = sampled.dim_domain();
  h.fiber = sampled.dim_fiber();
  for (int k = 0; k < h.dim; ++k) h.axes.push_back(sampled.grid().axis(k));
  write_payload(path, h, sampled.node_values());
}

Field read_field(const std::string& path) {
  Header h;
  std::vector<double> values = read_payload(path, h);
  if (h.kind != "field") fail(ErrorKind::IoError, "'" + path + "' holds a " + h.kind + ", not a field");
  Field f = Field::sampled(RectilinearGrid(h.axes), h.fiber, std::move(values));
  return f;
}

void write_connection(const std::string& path, const RectilinearGrid& grid, int dim_fiber,
                      const std::vector<double>& values) {
  Header h;
  h.kind = "connection";
  h.dim = grid.dim();
  h.fiber = dim_fiber;
  for (int k = 0; k < h.dim; ++k) h.axes.push_back(grid.axis(k));
  write_payload(path, h, values);
}

ConnectionForm read_connection(const std::string& path) {
  Header h;
  std::vector<double> values = read_payload(path, h);
  if (h.kind != "connection") fail(ErrorKind::IoError, "'" + path + "' holds a " + h.kind + ", not a connection");
  return ConnectionForm::sampled(RectilinearGrid(h.axes), h.fiber, std::move(values));
}

std::vector<double> sample_connection(const ConnectionForm& gamma, const RectilinearGrid& grid) {
  const int d = gamma.dim_domain();
  const int m = gamma.dim_fiber();
  if (grid.dim() != d) fail(ErrorKind::DimensionMismatch, "sample_connection: grid dimension");
  std::vector<double> values(grid.node_count() * d * m * m);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.node(node);
    for (int i = 0; i < d; ++i) {
      const Mat g = gamma.eval_matrix(x, unit_vector(d, i));
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) values[node * d * m * m + i * m * m + r * m + c] = g(r, c);
      }
    }
  }
  return values;
}

}  // namespace gaugetrace
