#include "dayahead/dc_network.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace dayahead {

namespace detail {

std::vector<Index> non_slack_positions(Index bus_count, BusId slack) {
  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(bus_count));
  for (Index i = 0; i < bus_count; ++i) {
    if (i != slack.position()) keep.push_back(i);
  }
  return keep;
}

bool pattern_connected(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& adjacency) {
  const Index n = adjacency.rows();
  if (n == 0) return false;
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::vector<Index> stack{0};
  reached[0] = true;
  Index count = 1;
  while (!stack.empty()) {
    const Index i = stack.back();
    stack.pop_back();
    for (Index j = 0; j < n; ++j) {
      if (i != j && adjacency(i, j) && !reached[static_cast<std::size_t>(j)]) {
        reached[static_cast<std::size_t>(j)] = true;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace detail

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      if (v == 0.0) v = 0.0;  // drop negative zero
      std::snprintf(buf, sizeof buf, "%.12g", v);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

void dump_network_csv(const DcNetwork<double>& network, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&dir](const char* name, const Matrix& m) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    write_matrix_csv(out, m);
  };
  write("B.csv", network.susceptance.entries);
  write("B_reduced.csv", network.reduced.entries);
  write("X.csv", network.line_matrix.entries);
  write("T.csv", network.ptdf.entries);
}

}  // namespace dayahead
