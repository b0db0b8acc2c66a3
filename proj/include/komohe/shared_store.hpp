#pragma once

#include <memory>
#include <mutex>
#include <utility>

#include "komohe/crosswalk_store.hpp"

namespace komohe {

/// Publishes immutable Store snapshots. Readers grab a snapshot and keep it
/// for as long as they need; writers are serialized, work on a private copy,
/// and publish it atomically.
class SharedStore {
 public:
  SharedStore() : current_(std::make_shared<const Store>()) {}
  explicit SharedStore(Store store)
      : current_(std::make_shared<const Store>(std::move(store))) {}

  std::shared_ptr<const Store> snapshot() const {
    std::lock_guard lock(publish_mutex_);
    return current_;
  }

  /// Runs fn on a copy of the current store and publishes the copy when fn
  /// returns normally. If fn throws, the published snapshot is unchanged.
  template <typename Fn>
  decltype(auto) update(Fn&& fn) {
    std::lock_guard writer(writer_mutex_);
    auto next = std::make_shared<Store>(*snapshot());
    if constexpr (std::is_void_v<decltype(fn(*next))>) {
      fn(*next);
      publish(std::move(next));
    } else {
      auto result = fn(*next);
      publish(std::move(next));
      return result;
    }
  }

 private:
  void publish(std::shared_ptr<Store> next) {
    std::lock_guard lock(publish_mutex_);
    current_ = std::move(next);
  }

  mutable std::mutex publish_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const Store> current_;
};

}  // namespace komohe
