#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace semiq {

// Evaluation warnings, deduplicated by message with occurrence counts, kept in
// first-seen order.
class WarningLog {
 public:
  void add(std::string message, std::size_t count = 1);
  void merge(const WarningLog& other);

  bool empty() const { return entries_.empty(); }
  std::size_t total() const;
  const std::vector<std::pair<std::string, std::size_t>>& entries() const { return entries_; }

  // "message" or "message (N times)".
  std::vector<std::string> lines() const;

 private:
  std::vector<std::pair<std::string, std::size_t>> entries_;
};

}  // namespace semiq
