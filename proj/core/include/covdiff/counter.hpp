// Copyright the covdiff authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>

namespace covdiff {

struct CounterSnapshot {
  std::int64_t matvecs = 0;
  std::int64_t mg_setups = 0;
  std::int64_t vcycles = 0;

  CounterSnapshot& operator+=(const CounterSnapshot& o) {
    matvecs += o.matvecs;
    mg_setups += o.mg_setups;
    vcycles += o.vcycles;
    return *this;
  }
  friend CounterSnapshot operator+(CounterSnapshot a, const CounterSnapshot& b) { return a += b; }
  friend CounterSnapshot operator-(CounterSnapshot a, const CounterSnapshot& b) {
    a.matvecs -= b.matvecs;
    a.mg_setups -= b.mg_setups;
    a.vcycles -= b.vcycles;
    return a;
  }
  friend bool operator==(const CounterSnapshot&, const CounterSnapshot&) = default;
};

// Cost tallies in units of one application of A to one length-N vector.
// Safe to increment from concurrent block solves.
class MatvecCounter {
 public:
  MatvecCounter() = default;
  MatvecCounter(const MatvecCounter&) = delete;
  MatvecCounter& operator=(const MatvecCounter&) = delete;

  void add_matvecs(std::int64_t n = 1) { matvecs_.fetch_add(n, std::memory_order_relaxed); }
  void add_mg_setups(std::int64_t n = 1) { setups_.fetch_add(n, std::memory_order_relaxed); }
  void add_vcycles(std::int64_t n = 1) { vcycles_.fetch_add(n, std::memory_order_relaxed); }

  void merge(const CounterSnapshot& s) {
    add_matvecs(s.matvecs);
    add_mg_setups(s.mg_setups);
    add_vcycles(s.vcycles);
  }

  std::int64_t matvecs() const { return matvecs_.load(std::memory_order_relaxed); }
  std::int64_t mg_setups() const { return setups_.load(std::memory_order_relaxed); }
  std::int64_t vcycles() const { return vcycles_.load(std::memory_order_relaxed); }

  CounterSnapshot snapshot() const { return {matvecs(), mg_setups(), vcycles()}; }

  void reset() {
    matvecs_.store(0);
    setups_.store(0);
    vcycles_.store(0);
  }

 private:
  std::atomic<std::int64_t> matvecs_{0};
  std::atomic<std::int64_t> setups_{0};
  std::atomic<std::int64_t> vcycles_{0};
};

inline void count_matvecs(MatvecCounter* c, std::int64_t n = 1) {
  if (c) c->add_matvecs(n);
}

}  // namespace covdiff
