#pragma once

#include <array>
#include <atomic>
#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gom/ids.hpp"
#include "gom/signature.hpp"

namespace gom {

class Factory;
struct TermStoreTestAccess;

/// Capability required to call TermStore::intern. Only the factory (and the
/// store's own tests) can mint one, so client code cannot construct a term
/// that bypasses the operator hooks.
class InternKey {
  friend class Factory;
  friend struct TermStoreTestAccess;
  InternKey() = default;
};

/// Maximally shared term storage. Every structurally distinct term exists
/// exactly once, so equality is a comparison of refs.
///
/// Interning is linearizable; node data is immutable once published and may
/// be read from any thread without locking.
class TermStore {
 public:
  explicit TermStore(std::shared_ptr<const Signature> signature);
  ~TermStore();

  TermStore(const TermStore&) = delete;
  TermStore& operator=(const TermStore&) = delete;

  /// Returns the unique node for `op(children...)`. Throws Error with
  /// ArityMismatch, SortMismatch or StoreMismatch.
  NodeRef intern(InternKey, OpId op, std::span<const NodeRef> children);

  /// Lookup without creation.
  std::optional<NodeRef> find(OpId op, std::span<const NodeRef> children) const;

  bool node_equal(NodeRef a, NodeRef b) const;
  /// Lexicographic order of the printed forms; equal iff node_equal.
  std::strong_ordering compare_terms(NodeRef a, NodeRef b) const;
  /// `a`, `f(x,y)`, `concPar()`; no whitespace.
  const std::string& print_term(NodeRef a) const;
  SortId sort_of(NodeRef a) const;
  const std::string& sort_name(NodeRef a) const { return signature_->sort_name(sort_of(a)); }

  OpId op_of(NodeRef a) const;
  const OperatorInfo& info(NodeRef a) const { return signature_->info(op_of(a)); }
  std::span<const NodeRef> children(NodeRef a) const;

  bool owns(NodeRef a) const { return a.store == tag_ && a.index < size(); }
  /// Number of distinct nodes interned so far.
  std::size_t size() const { return count_.load(std::memory_order_acquire); }

  const Signature& signature() const { return *signature_; }
  std::shared_ptr<const Signature> shared_signature() const { return signature_; }
  std::uint32_t tag() const { return tag_; }

 private:
  struct Node {
    OpId op;
    SortId sort;
    std::vector<NodeRef> children;
    std::string printed;
  };

  // Segment k holds kFirstSegment << k nodes; segments never move, so readers
  // holding a published index need no lock.
  static constexpr std::size_t kFirstSegmentBits = 10;
  static constexpr std::size_t kSegments = 22;

  const Node& node(NodeRef a) const;
  const Node& node_at(std::uint32_t index) const;
  Node& slot_for(std::uint32_t index);
  void check(NodeRef a) const;
  static std::size_t hash_shape(OpId op, std::span<const NodeRef> children);

  std::shared_ptr<const Signature> signature_;
  std::uint32_t tag_;
  std::array<std::atomic<Node*>, kSegments> segments_{};
  std::atomic<std::uint32_t> count_{0};
  mutable std::mutex intern_mutex_;
  std::unordered_multimap<std::size_t, std::uint32_t> table_;
};

}  // namespace gom
