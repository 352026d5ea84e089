#pragma once

#include <string>

#include "gaugetrace/connection.hpp"
#include "gaugetrace/field.hpp"

namespace gaugetrace {

/// Grid dump format: an ASCII header
///
///   gaugetrace-grid 1
///   kind field|connection
///   dim <d>
///   fiber <m>
///   axis <count> <node> <node> ...      (one line per axis)
///   values <count>
///   end
///
/// followed by `values` little-endian float64 numbers in row-major node order
/// (m per node for fields, d*m*m per node for connections).
void write_field(const std::string& path, const Field& field);
Field read_field(const std::string& path);

/// Node data layout as in ConnectionForm::sampled.
void write_connection(const std::string& path, const RectilinearGrid& grid, int dim_fiber,
                      const std::vector<double>& values);
ConnectionForm read_connection(const std::string& path);

/// Samples `gamma` at every node of `grid` in the ConnectionForm::sampled layout.
std::vector<double> sample_connection(const ConnectionForm& gamma, const RectilinearGrid& grid);

}  // namespace gaugetrace
