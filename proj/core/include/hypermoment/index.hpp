#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hypermoment {

inline constexpr int kMaxDim = 6;

// Element of N^D. Components may go negative through arithmetic; such an
// index is "void" and every coefficient looked up with it is zero.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim);
  MultiIndex(std::initializer_list<int> components);

  static MultiIndex unit(int dim, int axis);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  int order() const;
  bool is_void() const;
  double factorial() const;  // alpha! = prod alpha_i!

  // alpha + k e_axis
  MultiIndex shifted(int axis, int k = 1) const;
  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  bool operator==(const MultiIndex& o) const;
  bool operator!=(const MultiIndex& o) const { return !(*this == o); }

  // The last D-1 components (empty index when D = 1).
  MultiIndex tail() const;

  std::string to_string() const;  // "a1,a2,..."
  static MultiIndex parse(std::string_view text);

 private:
  std::array<int, kMaxDim> c_{};
  int dim_ = 0;
};

std::int64_t binomial(std::int64_t n, std::int64_t k);

// 1-based rank in the graded ordering used throughout the library.
std::int64_t ordinal(const MultiIndex& alpha);
MultiIndex unrank(int dim, std::int64_t rank);
// Number of indices of order <= max_order.
std::int64_t cardinality(int dim, int max_order);

// All indices of order <= M, stored in rank order. Slots are 0-based.
class IndexSet {
 public:
  IndexSet(int dim, int max_order);

  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& at(std::size_t slot) const { return indices_[slot]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  // -1 for void indices and indices beyond max_order.
  long slot(const MultiIndex& alpha) const;
  // First slot of the given order.
  std::size_t order_begin(int order) const;

 private:
  int dim_;
  int max_order_;
  std::vector<MultiIndex> indices_;
};

// Shared, cached instance.
std::shared_ptr<const IndexSet> index_set(int dim, int max_order);

// Groups slots by the tail (alpha_2..alpha_D). Blocks are ordered by the rank
// of the tail, entries inside a block by alpha_1.
class BlockPermutation {
 public:
  struct Block {
    MultiIndex tail;
    int tail_order = 0;
    std::size_t start = 0;  // position in permuted order
    std::size_t size = 0;
  };

  BlockPermutation(int dim, int max_order);

  std::size_t size() const { return to_natural_.size(); }
  // natural slot -> permuted position
  std::size_t permuted(std::size_t slot) const { return to_permuted_[slot]; }
  // permuted position -> natural slot
  std::size_t natural(std::size_t pos) const { return to_natural_[pos]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_of_position(std::size_t pos) const { return block_of_[pos]; }

 private:
  std::vector<std::size_t> to_permuted_;
  std::vector<std::size_t> to_natural_;
  std::vector<std::size_t> block_of_;
  std::vector<Block> blocks_;
};

}  // namespace hypermoment
