#pragma once

#include <cstddef>
#include <iterator>
#include <memory>
#include <vector>

namespace cbpv {

// Immutable cons list. Machine states share their tails, so a step that
// pushes or pops one frame never copies the rest.
template <class T>
class PList {
  struct Node {
    T head;
    std::shared_ptr<const Node> tail;
    std::size_t size;
  };

 public:
  PList() = default;

  PList push(T x) const {
    PList r;
    r.n_ = std::make_shared<const Node>(Node{std::move(x), n_, size() + 1});
    return r;
  }
  const T& top() const { return n_->head; }
  PList pop() const {
    PList r;
    r.n_ = n_->tail;
    return r;
  }
  bool empty() const { return !n_; }
  std::size_t size() const { return n_ ? n_->size : 0; }
  const void* id() const { return n_.get(); }

  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    iterator() = default;
    explicit iterator(const Node* n) : n_(n) {}
    const T& operator*() const { return n_->head; }
    const T* operator->() const { return &n_->head; }
    iterator& operator++() {
      n_ = n_->tail.get();
      return *this;
    }
    iterator operator++(int) {
      iterator r = *this;
      ++*this;
      return r;
    }
    bool operator==(const iterator& o) const { return n_ == o.n_; }

   private:
    const Node* n_ = nullptr;
  };
  iterator begin() const { return iterator(n_.get()); }
  iterator end() const { return iterator(nullptr); }

  static PList from_top_first(const std::vector<T>& xs) {
    PList r;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) r = r.push(*it);
    return r;
  }
  std::vector<T> to_vector() const { return {begin(), end()}; }

 private:
  std::shared_ptr<const Node> n_;
};

}  // namespace cbpv
