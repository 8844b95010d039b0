#include "lipfree/matrix.hpp"

#include <algorithm>

namespace lipfree {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) {
      throw Error("ragged matrix: row " + std::to_string(i) + " has " +
                  std::to_string(rows[i].size()) + " entries, expected " + std::to_string(c));
    }
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

Matrix Matrix::restrict_to(std::span<const Index> indices) const {
  Matrix m(indices.size(), indices.size());
  for (std::size_t a = 0; a < indices.size(); ++a) {
    for (std::size_t b = 0; b < indices.size(); ++b) m(a, b) = (*this)(indices[a], indices[b]);
  }
  return m;
}

IndexSet make_index_set(std::vector<Index> members, std::size_t n) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (!members.empty() && members.back() >= n) {
    throw Error("point index " + std::to_string(members.back()) + " out of range (space has " +
                std::to_string(n) + " points)");
  }
  return members;
}

bool contains(const IndexSet& set, Index i) { return std::binary_search(set.begin(), set.end(), i); }

IndexSet complement(const IndexSet& set, std::size_t n) {
  IndexSet out;
  out.reserve(n - std::min(n, set.size()));
  std::size_t k = 0;
  for (Index i = 0; i < n; ++i) {
    if (k < set.size() && set[k] == i) {
      ++k;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace lipfree
