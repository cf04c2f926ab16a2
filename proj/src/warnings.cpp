#include "semiq/warnings.hpp"

#include <algorithm>

namespace semiq {

void WarningLog::add(std::string message, std::size_t count) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const auto& e) { return e.first == message; });
  if (it != entries_.end()) {
    it->second += count;
  } else {
    entries_.emplace_back(std::move(message), count);
  }
}

void WarningLog::merge(const WarningLog& other) {
  for (const auto& [message, count] : other.entries_) add(message, count);
}

std::size_t WarningLog::total() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second;
  return n;
}

std::vector<std::string> WarningLog::lines() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [message, count] : entries_) {
    out.push_back(count == 1 ? message : message + " (" + std::to_string(count) + " times)");
  }
  return out;
}

}  // namespace semiq
