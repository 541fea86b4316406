#include "hypermoment/index.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "hypermoment/errors.hpp"

namespace hypermoment {

namespace {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw DomainError("dimension " + std::to_string(dim) + " outside [0, " +
                      std::to_string(kMaxDim) + "]");
  }
}

}  // namespace

MultiIndex::MultiIndex(int dim) : dim_(dim) { check_dim(dim); }

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : dim_(static_cast<int>(components.size())) {
  check_dim(dim_);
  std::copy(components.begin(), components.end(), c_.begin());
}

MultiIndex MultiIndex::unit(int dim, int axis) {
  MultiIndex e(dim);
  e[axis] = 1;
  return e;
}

int MultiIndex::order() const {
  return std::accumulate(c_.begin(), c_.begin() + dim_, 0);
}

bool MultiIndex::is_void() const {
  return std::any_of(c_.begin(), c_.begin() + dim_, [](int v) { return v < 0; });
}

double MultiIndex::factorial() const {
  double out = 1.0;
  for (int i = 0; i < dim_; ++i) {
    for (int k = 2; k <= c_[i]; ++k) out *= k;
  }
  return out;
}

MultiIndex MultiIndex::shifted(int axis, int k) const {
  MultiIndex out = *this;
  out.c_[static_cast<std::size_t>(axis)] += k;
  return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex out = *this;
  for (int i = 0; i < dim_; ++i) out.c_[i] += o.c_[i];
  return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  MultiIndex out = *this;
  for (int i = 0; i < dim_; ++i) out.c_[i] -= o.c_[i];
  return out;
}

bool MultiIndex::operator==(const MultiIndex& o) const {
  return dim_ == o.dim_ && std::equal(c_.begin(), c_.begin() + dim_, o.c_.begin());
}

MultiIndex MultiIndex::tail() const {
  MultiIndex out(std::max(dim_ - 1, 0));
  for (int i = 1; i < dim_; ++i) out.c_[i - 1] = c_[i];
  return out;
}

std::string MultiIndex::to_string() const {
  std::string s;
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ',';
    s += std::to_string(c_[i]);
  }
  return s;
}

MultiIndex MultiIndex::parse(std::string_view text) {
  MultiIndex out;
  std::size_t pos = 0;
  int d = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string_view::npos) next = text.size();
    auto piece = text.substr(pos, next - pos);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size() || v < 0) {
      throw DomainError("malformed multi-index '" + std::string(text) + "'");
    }
    if (d >= kMaxDim) throw DomainError("multi-index has too many components");
    out.c_[static_cast<std::size_t>(d++)] = v;
    pos = next + 1;
  }
  out.dim_ = d;
  return out;
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using wide = __int128;
  wide r = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::int64_t>::max()) {
      throw DomainError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                        ") overflows 64 bits");
    }
  }
  return static_cast<std::int64_t>(r);
}

std::int64_t ordinal(const MultiIndex& alpha) {
  if (alpha.is_void()) throw DomainError("ordinal of void multi-index " + alpha.to_string());
  const int D = alpha.dim();
  std::int64_t rank = 1;
  std::int64_t tail_sum = 0;
  for (int i = 1; i <= D; ++i) {
    tail_sum += alpha[D - i];
    std::int64_t term = binomial(tail_sum + i - 1, i);
    if (rank > std::numeric_limits<std::int64_t>::max() - term) {
      throw DomainError("ordinal overflows 64 bits");
    }
    rank += term;
  }
  return rank;
}

MultiIndex unrank(int dim, std::int64_t rank) {
  check_dim(dim);
  if (rank < 1) throw DomainError("rank must be >= 1");
  MultiIndex out(dim);
  if (dim == 0) {
    if (rank != 1) throw DomainError("rank out of range for dimension 0");
    return out;
  }
  // Combinatorial number system: rank - 1 = sum_i C(s_i + i - 1, i) with
  // s_D >= ... >= s_1 >= 0 the partial tail sums.
  std::int64_t rest = rank - 1;
  std::vector<std::int64_t> s(static_cast<std::size_t>(dim) + 1, 0);
  for (int i = dim; i >= 1; --i) {
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    while (binomial(hi + i - 1, i) <= rest) hi *= 2;
    while (hi - lo > 1) {  // largest v with C(v + i - 1, i) <= rest
      std::int64_t mid = lo + (hi - lo) / 2;
      (binomial(mid + i - 1, i) <= rest ? lo : hi) = mid;
    }
    s[static_cast<std::size_t>(i)] = lo;
    rest -= binomial(lo + i - 1, i);
  }
  for (int i = 1; i <= dim; ++i) {
    out[dim - i] = static_cast<int>(s[static_cast<std::size_t>(i)] - s[static_cast<std::size_t>(i) - 1]);
  }
  return out;
}

std::int64_t cardinality(int dim, int max_order) {
  check_dim(dim);
  if (max_order < 0) return 0;
  return binomial(static_cast<std::int64_t>(max_order) + dim, dim);
}

IndexSet::IndexSet(int dim, int max_order) : dim_(dim), max_order_(max_order) {
  check_dim(dim);
  if (dim < 1) throw DomainError("index set needs dimension >= 1");
  if (max_order < 0) throw DomainError("negative maximal order");
  const std::int64_t n = cardinality(dim, max_order);
  indices_.reserve(static_cast<std::size_t>(n));
  for (std::int64_t r = 1; r <= n; ++r) indices_.push_back(unrank(dim, r));
}

long IndexSet::slot(const MultiIndex& alpha) const {
  if (alpha.is_void() || alpha.order() > max_order_) return -1;
  return static_cast<long>(ordinal(alpha) - 1);
}

std::size_t IndexSet::order_begin(int order) const {
  return static_cast<std::size_t>(cardinality(dim_, order - 1));
}

std::shared_ptr<const IndexSet> index_set(int dim, int max_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const IndexSet>> cache;
  std::lock_guard lock(mutex);
  auto& entry = cache[{dim, max_order}];
  if (!entry) entry = std::make_shared<const IndexSet>(dim, max_order);
  return entry;
}

BlockPermutation::BlockPermutation(int dim, int max_order) {
  const auto set = index_set(dim, max_order);
  const std::size_t n = set->size();
  std::vector<std::pair<std::int64_t, int>> keys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const MultiIndex& a = set->at(k);
    keys[k] = {dim > 1 ? ordinal(a.tail()) : 1, a[0]};
  }
  to_natural_.resize(n);
  std::iota(to_natural_.begin(), to_natural_.end(), std::size_t{0});
  std::stable_sort(to_natural_.begin(), to_natural_.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  to_permuted_.resize(n);
  block_of_.resize(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t slot = to_natural_[pos];
    to_permuted_[slot] = pos;
    if (blocks_.empty() || keys[to_natural_[blocks_.back().start]].first != keys[slot].first) {
      Block b;
      b.tail = set->at(slot).tail();
      b.tail_order = b.tail.order();
      b.start = pos;
      blocks_.push_back(b);
    }
    blocks_.back().size += 1;
    block_of_[pos] = blocks_.size() - 1;
  }
}

}  // namespace hypermoment
