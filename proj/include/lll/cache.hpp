#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

namespace lll {

// Process-wide memo for expensive pure computations (augmenting events,
// marginal tables, estimates). Keys embed the instance's canonical form plus
// every parameter, so hits are exact by construction. Thread safe; concurrent
// misses may compute the same value twice, the first insert wins.
class SharedCache {
 public:
  template <class T, class Fn>
  std::shared_ptr<const T> get_or_compute(const std::string& key, Fn&& fn) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        ++hits_;
        return std::static_pointer_cast<const T>(it->second);
      }
    }
    auto value = std::make_shared<const T>(fn());
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = entries_.emplace(key, value);
    if (!inserted) return std::static_pointer_cast<const T>(it->second);
    ++misses_;
    return value;
  }

  uint64_t hits() const { return hits_; }
  uint64_t misses() const { return misses_; }

 private:
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const void>> entries_;
  uint64_t hits_ = 0;
  uint64_t misses_ = 0;
};

}  // namespace lll
