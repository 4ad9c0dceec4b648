#include "tmsi/cumulant.hpp"

#include <algorithm>

#include "tmsi/errors.hpp"

namespace tmsi::cumulant {

namespace {

void extend(int next, int n, Partition& current, std::vector<Partition>& out) {
  if (next == n) {
    out.push_back(current);
    return;
  }
  for (std::size_t b = 0; b < current.size(); ++b) {
    current[b].push_back(next);
    extend(next + 1, n, current, out);
    current[b].pop_back();
  }
  current.push_back(Block{next});
  extend(next + 1, n, current, out);
  current.pop_back();
}

cplx product_over_blocks(const Partition& p, const BlockValue& value) {
  cplx acc(1.0, 0.0);
  for (const auto& block : p) acc *= value(block);
  return acc;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<Partition> set_partitions(int n) {
  if (n < 0) throw DomainError("set_partitions: n must be >= 0");
  std::vector<Partition> out;
  Partition current;
  extend(0, n, current, out);
  return out;
}

cplx truncated_moment(int n, const BlockValue& moment) {
  cplx total(0.0, 0.0);
  for (const auto& p : set_partitions(n)) {
    const int size = static_cast<int>(p.size());
    if (size == 1) continue;
    const double sign = (size % 2 == 0) ? 1.0 : -1.0;
    total += factorial(size - 1) * sign * product_over_blocks(p, moment);
  }
  return total;
}

cplx moment_from_cumulants(int n, const BlockValue& cumulant) {
  cplx total(0.0, 0.0);
  for (const auto& p : set_partitions(n)) total += product_over_blocks(p, cumulant);
  return total;
}

cplx connected_sum(int n, int split, const BlockValue& cumulant) {
  if (split <= 0 || split >= n) throw DomainError("connected_sum: split must lie strictly inside the product");
  cplx total(0.0, 0.0);
  for (const auto& p : set_partitions(n)) {
    const bool straddles = std::any_of(p.begin(), p.end(), [split](const Block& b) {
      return b.front() < split && b.back() >= split;
    });
    if (straddles) total += product_over_blocks(p, cumulant);
  }
  return total;
}

}  // namespace tmsi::cumulant
