// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cassert>

namespace detpac {

/// Extended real used by the constrained dynamic programs: either a finite
/// double or an explicit "minus infinity" sentinel. The sentinel absorbs any
/// addition, so an unreachable prefix can never leak a finite value into a
/// downstream comparison.
class ExtReal {
 public:
  ExtReal() : finite_(true), v_(0.0) {}
  ExtReal(double v) : finite_(true), v_(v) {}  // NOLINT: implicit by design

  static ExtReal neg_inf() {
    ExtReal r;
    r.finite_ = false;
    r.v_ = 0.0;
    return r;
  }

  bool is_neg_inf() const { return !finite_; }
  bool is_finite() const { return finite_; }

  double value() const {
    assert(finite_);
    return v_;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (!a.finite_ || !b.finite_) return neg_inf();
    return ExtReal(a.v_ + b.v_);
  }

  friend ExtReal operator+(ExtReal a, double b) { return a + ExtReal(b); }
  friend ExtReal operator+(double a, ExtReal b) { return ExtReal(a) + b; }

  friend bool operator<(ExtReal a, ExtReal b) {
    if (!a.finite_) return b.finite_;
    if (!b.finite_) return false;
    return a.v_ < b.v_;
  }
  friend bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }
  friend bool operator>=(ExtReal a, ExtReal b) { return !(a < b); }

  static ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

 private:
  bool finite_;
  double v_;
};

}  // namespace detpac
