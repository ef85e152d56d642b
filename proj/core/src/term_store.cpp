#include "gom/term_store.hpp"

#include <bit>

namespace gom {

namespace {

std::atomic<std::uint32_t> next_store_tag{1};

}  // namespace

TermStore::TermStore(std::shared_ptr<const Signature> signature)
    : signature_(std::move(signature)), tag_(next_store_tag.fetch_add(1)) {}

TermStore::~TermStore() {
  for (auto& seg : segments_) delete[] seg.load(std::memory_order_relaxed);
}

const TermStore::Node& TermStore::node_at(std::uint32_t index) const {
  const std::size_t k = std::bit_width((std::size_t{index} >> kFirstSegmentBits) + 1) - 1;
  const std::size_t offset = index - (((std::size_t{1} << k) - 1) << kFirstSegmentBits);
  return segments_[k].load(std::memory_order_acquire)[offset];
}

TermStore::Node& TermStore::slot_for(std::uint32_t index) {
  const std::size_t k = std::bit_width((std::size_t{index} >> kFirstSegmentBits) + 1) - 1;
  const std::size_t offset = index - (((std::size_t{1} << k) - 1) << kFirstSegmentBits);
  if (k >= kSegments) throw std::length_error("term store is full");
  Node* seg = segments_[k].load(std::memory_order_relaxed);
  if (!seg) {
    seg = new Node[std::size_t{1} << (kFirstSegmentBits + k)];
    segments_[k].store(seg, std::memory_order_release);
  }
  return seg[offset];
}

void TermStore::check(NodeRef a) const {
  if (!owns(a)) {
    throw Error(ErrorCode::StoreMismatch, "node ref does not belong to this store");
  }
}

const TermStore::Node& TermStore::node(NodeRef a) const {
  check(a);
  return node_at(a.index);
}

std::size_t TermStore::hash_shape(OpId op, std::span<const NodeRef> children) {
  std::size_t h = std::hash<std::uint32_t>{}(index_of(op));
  for (NodeRef c : children) h = h * 1000003u ^ std::hash<std::uint32_t>{}(c.index);
  return h;
}

NodeRef TermStore::intern(InternKey, OpId op, std::span<const NodeRef> children) {
  if (index_of(op) >= signature_->operator_count()) {
    throw Error(ErrorCode::UnknownOperator, "operator id out of range");
  }
  const OperatorInfo& info = signature_->info(op);
  if (!info.variadic && children.size() != info.arity()) {
    throw Error(ErrorCode::ArityMismatch, "'" + info.name + "' takes " + std::to_string(info.arity()) +
                                              " arguments, got " + std::to_string(children.size()));
  }
  for (std::size_t i = 0; i < children.size(); ++i) {
    const SortId expected = info.variadic ? info.element_sort : info.slot_sorts[i];
    const SortId actual = sort_of(children[i]);
    if (actual != expected) {
      throw Error(ErrorCode::SortMismatch, "argument " + std::to_string(i + 1) + " of '" + info.name +
                                               "' must be " + signature_->sort_name(expected) + ", got " +
                                               signature_->sort_name(actual));
    }
  }

  const std::size_t h = hash_shape(op, children);
  std::lock_guard lock(intern_mutex_);
  auto [lo, hi] = table_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    const Node& n = node_at(it->second);
    if (n.op == op && std::equal(n.children.begin(), n.children.end(), children.begin(), children.end())) {
      return NodeRef{tag_, it->second};
    }
  }

  const std::uint32_t index = count_.load(std::memory_order_relaxed);
  Node& n = slot_for(index);
  n.op = op;
  n.sort = info.result_sort;
  n.children.assign(children.begin(), children.end());
  n.printed = info.name;
  if (!info.is_constant()) {
    std::size_t len = n.printed.size() + 2;
    for (NodeRef c : children) len += node_at(c.index).printed.size() + 1;
    n.printed.reserve(len);
    n.printed += '(';
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (i) n.printed += ',';
      n.printed += node_at(children[i].index).printed;
    }
    n.printed += ')';
  }
  table_.emplace(h, index);
  count_.store(index + 1, std::memory_order_release);
  return NodeRef{tag_, index};
}

std::optional<NodeRef> TermStore::find(OpId op, std::span<const NodeRef> children) const {
  const std::size_t h = hash_shape(op, children);
  std::lock_guard lock(intern_mutex_);
  auto [lo, hi] = table_.equal_range(h);
  for (auto it = lo; it != hi; ++it) {
    const Node& n = node_at(it->second);
    if (n.op == op && std::equal(n.children.begin(), n.children.end(), children.begin(), children.end())) {
      return NodeRef{tag_, it->second};
    }
  }
  return std::nullopt;
}

bool TermStore::node_equal(NodeRef a, NodeRef b) const {
  check(a);
  check(b);
  return a == b;
}

std::strong_ordering TermStore::compare_terms(NodeRef a, NodeRef b) const {
  if (node_equal(a, b)) return std::strong_ordering::equal;
  return node_at(a.index).printed.compare(node_at(b.index).printed) < 0 ? std::strong_ordering::less
                                                                         : std::strong_ordering::greater;
}

const std::string& TermStore::print_term(NodeRef a) const { return node(a).printed; }

SortId TermStore::sort_of(NodeRef a) const { return node(a).sort; }

OpId TermStore::op_of(NodeRef a) const { return node(a).op; }

std::span<const NodeRef> TermStore::children(NodeRef a) const { return node(a).children; }

}  // namespace gom
