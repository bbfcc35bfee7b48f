#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace recdiv {

// Binary max-heap over the ids 0..n-1 with a position handle per id, so keys
// can be lowered in place. Equal keys pop lowest id first. Keys live inline
// in the heap array to keep sifts cache-friendly.
template <typename Key>
class IndexedMaxHeap {
 public:
  using Id = std::uint32_t;

  explicit IndexedMaxHeap(std::size_t id_capacity) : pos_(id_capacity, kAbsent) {
    heap_.reserve(id_capacity);
  }

  // Builds a heap holding every id 0..keys.size()-1 in O(n).
  static IndexedMaxHeap from_keys(std::vector<Key> keys) {
    IndexedMaxHeap h(keys.size());
    h.heap_.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      h.heap_[i] = {std::move(keys[i]), static_cast<Id>(i)};
      h.pos_[i] = static_cast<Id>(i);
    }
    for (std::size_t i = h.heap_.size() / 2; i-- > 0;) h.sift_down(i);
    return h;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(Id id) const { return pos_[id] != kAbsent; }
  // Only for ids in the heap.
  const Key& key(Id id) const { return heap_[pos_[id]].key; }

  Id top() const { return heap_.front().id; }
  const Key& top_key() const { return heap_.front().key; }

  void push(Id id, Key key) {
    assert(!contains(id));
    heap_.push_back({std::move(key), id});
    sift_up(heap_.size() - 1);
  }

  void pop() {
    pos_[heap_.front().id] = kAbsent;
    Entry last = std::move(heap_.back());
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_.front() = std::move(last);
      sift_down(0);
    }
  }

  // new_key must not order before the current key.
  void decrease_key(Id id, Key new_key) {
    assert(contains(id));
    heap_[pos_[id]].key = std::move(new_key);
    sift_down(pos_[id]);
  }

 private:
  struct Entry {
    Key key;
    Id id;
  };

  static constexpr Id kAbsent = static_cast<Id>(-1);

  static bool before(const Entry& a, const Entry& b) {
    return a.key > b.key || (!(b.key > a.key) && a.id < b.id);
  }

  void place(std::size_t slot, Entry e) {
    pos_[e.id] = static_cast<Id>(slot);
    heap_[slot] = std::move(e);
  }

  void sift_up(std::size_t slot) {
    Entry e = std::move(heap_[slot]);
    while (slot > 0) {
      const std::size_t parent = (slot - 1) / 2;
      if (!before(e, heap_[parent])) break;
      place(slot, std::move(heap_[parent]));
      slot = parent;
    }
    place(slot, std::move(e));
  }

  void sift_down(std::size_t slot) {
    Entry e = std::move(heap_[slot]);
    const std::size_t n = heap_.size();
    while (true) {
      std::size_t child = 2 * slot + 1;
      if (child >= n) break;
      if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], e)) break;
      place(slot, std::move(heap_[child]));
      slot = child;
    }
    place(slot, std::move(e));
  }

  std::vector<Id> pos_;
  std::vector<Entry> heap_;
};

}  // namespace recdiv
