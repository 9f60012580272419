#pragma once

// Types shared by the theory sub-modules.

#include "zpsmt/atoms.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace zpsmt {

/// An asserted theory literal.
struct TrailEntry {
  AtomId atom;
  bool positive; // atom = 0 holds (otherwise atom != 0)
  Lit lit;
  int level;
};

/// Literals (true in the current assignment) whose conjunction is
/// inconsistent or implies a propagated literal.
using Explanation = std::vector<Lit>;

class TheoryTrail {
public:
  void push(const TrailEntry &e) { entries_.push_back(e); }
  const TrailEntry &operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  /// Drops every entry above `level`; returns the new size.
  std::size_t pop_above(int level) {
    while (!entries_.empty() && entries_.back().level > level)
      entries_.pop_back();
    return entries_.size();
  }

private:
  std::vector<TrailEntry> entries_;
};

using Clock = std::chrono::steady_clock;

struct Deadline {
  Clock::time_point at = Clock::time_point::max();

  static Deadline after(double seconds) {
    if (seconds <= 0)
      return {};
    return {Clock::now() + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(seconds))};
  }
  static Deadline earliest(Deadline a, Deadline b) {
    return a.at < b.at ? a : b;
  }
  bool expired() const { return Clock::now() >= at; }
};

} // namespace zpsmt
