// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmmfp/linalg.hpp"

namespace pmmfp {

// Which power grid a model may draw from. The positive-only track keeps the
// transforms that stay bounded near the origin; the full track adds the
// negative and inverse-root powers.
enum class Track { PositiveOnly, Full };

enum class EnumerationMode { SubsetsUpTo4, RoystonAltmanDeg2 };

// One exponent from the admissible grid {-2, -1, -0.5, 0, 0.5, 1, 2, 3},
// with the usual convention that power 0 denotes log(x).
class FpPower {
 public:
  explicit FpPower(double value);

  double value() const { return value_; }
  bool is_log() const { return value_ == 0.0; }

  static const std::vector<double>& grid(Track track);

  friend bool operator==(FpPower a, FpPower b) { return a.value_ == b.value_; }
  friend bool operator<(FpPower a, FpPower b) { return a.value_ < b.value_; }

 private:
  double value_;
};

struct FpTerm {
  FpPower power;
  bool repeated = false;  // contributes x^p and x^p*log(x)

  int column_count() const { return repeated ? 2 : 1; }
};

// A validated set of 1..4 terms drawn from one track's grid. Terms are kept
// sorted by power so labels and column order are canonical.
class FpBlock {
 public:
  FpBlock(std::vector<FpTerm> terms, Track track);

  // Convenience: non-repeated terms from a plain power list.
  static FpBlock from_powers(const std::vector<double>& powers,
                             Track track = Track::Full);

  const std::vector<FpTerm>& terms() const { return terms_; }
  Track track() const { return track_; }
  int column_count() const;

  // "{0.5}", "{-2,1}", repeated powers doubled: "{3,3}".
  std::string label() const;

 private:
  std::vector<FpTerm> terms_;
  Track track_;
};

struct DesignMatrix {
  Matrix values;  // n x (1 + block columns), intercept first
  std::vector<std::string> column_labels;
};

// x^p elementwise, log(x) for p = 0. All inputs must be strictly positive.
Vector fp_transform(const Vector& x, FpPower p);

struct ShiftResult {
  Vector x;
  double offset = 0.0;
};

// Returns x unchanged when already strictly positive; otherwise shifts by
// -min(x) + delta with delta = max(1, range/100). An explicit offset, when
// supplied, is applied verbatim.
ShiftResult shift_domain(const Vector& x, std::optional<double> offset = {});

// Intercept column plus one (or two, if repeated) columns per term. The
// offset parameter only decorates labels; x is assumed already shifted.
DesignMatrix build_design(const Vector& x, const FpBlock& block,
                          double offset = 0.0);

// All candidate blocks for a track in a deterministic order (sizes ascending,
// lexicographic within a size). SubsetsUpTo4 honours max_terms (<= 4);
// RoystonAltmanDeg2 yields degree-1 singletons plus unordered degree-2 pairs
// with repetition.
std::vector<FpBlock> enumerate_blocks(Track track, EnumerationMode mode,
                                      int max_terms = 4);

}  // namespace pmmfp
