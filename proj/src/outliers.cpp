#include "rmt/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rmt {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

void validate_d(const RealVector& d) {
  for (Index i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw std::invalid_argument("partition: d entries must be nonzero");
    if (i > 0 && d[i] < d[i - 1])
      throw std::invalid_argument("partition: d must be ascending");
  }
}

Partition build_partition(const RealVector& d, const ControlParams& cp, double cutoff,
                          Partition::Kind kind) {
  validate_d(d);
  const int r = static_cast<int>(d.size());
  UnionFind uf(r);
  // The pair rule is applied with both index orders: either endpoint may act
  // as the strength supplying the |d| - 1 factor of the metric.
  for (int i = 0; i < r; ++i) {
    if (std::abs(d[i]) <= 1.0) continue;
    for (int j = 0; j < r; ++j) {
      if (j == i) continue;
      if (overlap_metric(d[i], d[j], cp.n) <= cutoff) uf.unite(i, j);
    }
  }

  std::vector<char> outlier(r, 0);
  for (int i = 0; i < r; ++i) outlier[i] = is_outlier(d[i], cp) ? 1 : 0;

  Partition part;
  part.kind = kind;
  part.cutoff = cutoff;
  std::vector<int> root_to_block(r, -1);
  for (int i = 0; i < r; ++i) {
    const int root = uf.find(i);
    // A component enters the partition only if some member passes the
    // outlier threshold.
    bool keep = false;
    for (int j = 0; j < r; ++j)
      if (uf.find(j) == root && outlier[j]) keep = true;
    if (!keep) continue;
    if (root_to_block[root] < 0) {
      root_to_block[root] = static_cast<int>(part.blocks.size());
      part.blocks.emplace_back();
    }
    part.blocks[root_to_block[root]].push_back(i + 1);
  }

  for (auto& block : part.blocks) {
    std::sort(block.begin(), block.end());
    bool has_pos = false, has_neg = false;
    for (int idx : block) (d[idx - 1] > 0.0 ? has_pos : has_neg) = true;
    if (has_pos && has_neg)
      throw std::invalid_argument(
          "partition: block mixes positive and negative strengths; the overlap "
          "rule only merges across zero at dimensions too small to be meaningful");
    for (std::size_t k = 1; k < block.size(); ++k)
      if (block[k] != block[k - 1] + 1)
        throw std::logic_error("partition: block is not consecutive");
  }
  std::sort(part.blocks.begin(), part.blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return part;
}

}  // namespace

int alpha_index(int i, const RealVector& d, Index n) {
  const int r = static_cast<int>(d.size());
  if (i < 1 || i > r) throw std::invalid_argument("alpha_index: i out of range");
  if (n < r) throw std::invalid_argument("alpha_index: n >= r required");
  const double di = d[i - 1];
  if (di == 0.0) throw std::invalid_argument("alpha_index: d_i must be nonzero");
  return di < 0.0 ? i : static_cast<int>(n) - r + i;
}

bool is_outlier(double d_i, const ControlParams& cp) {
  if (cp.n < 3) throw std::invalid_argument("is_outlier: control params need n >= 3");
  return std::abs(d_i) - 1.0 >= cp.outlier_threshold();
}

double overlap_metric(double d_i, double d_j, Index n) {
  if (std::abs(d_i) <= 1.0)
    throw std::invalid_argument("overlap_metric: requires |d_i| > 1");
  if (n < 1) throw std::invalid_argument("overlap_metric: n >= 1 required");
  return std::sqrt(static_cast<double>(n)) * std::sqrt(std::abs(d_i) - 1.0) *
         std::abs(d_i - d_j);
}

std::vector<int> Partition::covered() const {
  std::vector<int> all;
  for (const auto& block : blocks) all.insert(all.end(), block.begin(), block.end());
  std::sort(all.begin(), all.end());
  return all;
}

Index Partition::covered_size() const {
  Index total = 0;
  for (const auto& block : blocks) total += static_cast<Index>(block.size());
  return total;
}

Partition partition_fine(const RealVector& d, const ControlParams& cp) {
  return build_partition(d, cp, cp.fine_cutoff(), Partition::Kind::fine);
}

Partition partition_coarse(const RealVector& d, const ControlParams& cp) {
  return build_partition(d, cp, cp.coarse_cutoff(), Partition::Kind::coarse);
}

double block_reference_d(const std::vector<int>& block, const RealVector& d) {
  if (block.empty()) throw std::invalid_argument("block_reference_d: empty block");
  double ref = d[block.front() - 1];
  for (int idx : block) {
    if (idx < 1 || idx > d.size())
      throw std::invalid_argument("block_reference_d: index out of range");
    ref = std::min(ref, d[idx - 1]);
  }
  return ref;
}

PartialSpectrum PartialSpectrum::from_full(const RealVector& spectrum) {
  PartialSpectrum ps;
  ps.n = spectrum.size();
  ps.low = spectrum;
  ps.high = spectrum;
  return ps;
}

double PartialSpectrum::value_at(int alpha) const {
  if (alpha < 1 || alpha > n)
    throw std::invalid_argument("PartialSpectrum: position out of range");
  if (alpha <= low.size()) return low[alpha - 1];
  const Index from_top = n - alpha;  // 0 for the largest eigenvalue
  if (from_top < high.size()) return high[high.size() - 1 - from_top];
  throw std::invalid_argument("PartialSpectrum: position " + std::to_string(alpha) +
                              " not covered by the stored extremes");
}

RescaledOutliers extract_and_rescale(const PartialSpectrum& spectrum,
                                     const Partition& partition, const RealVector& d) {
  const Index n = spectrum.n;
  const int r = static_cast<int>(d.size());
  RescaledOutliers out;
  for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
    const auto& block = partition.blocks[b];
    const double d_pi = block_reference_d(block, d);
    const double scale =
        std::sqrt(static_cast<double>(n)) / std::sqrt(std::abs(d_pi) - 1.0);
    const double center = theta(d_pi);
    for (int idx : block) {
      if (idx < 1 || idx > r)
        throw std::invalid_argument("extract_and_rescale: block index out of range");
      const double mu = spectrum.value_at(alpha_index(idx, d, n));
      out.indices.push_back(idx);
      out.block_of.push_back(static_cast<int>(b));
      out.values.push_back(scale * (mu - center));
    }
  }
  return out;
}

RescaledOutliers extract_and_rescale(const RealVector& spectrum,
                                     const Partition& partition, const RealVector& d,
                                     Index n) {
  if (spectrum.size() != n)
    throw std::invalid_argument("extract_and_rescale: spectrum must have length n");
  for (Index i = 1; i < spectrum.size(); ++i)
    if (spectrum[i] < spectrum[i - 1])
      throw std::invalid_argument("extract_and_rescale: spectrum must be ascending");
  return extract_and_rescale(PartialSpectrum::from_full(spectrum), partition, d);
}

}  // namespace rmt
