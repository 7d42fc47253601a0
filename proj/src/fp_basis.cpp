// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/fp_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pmmfp/errors.hpp"

namespace pmmfp {

namespace {

const std::vector<double> kFullGrid = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};
const std::vector<double> kPositiveGrid = {0.0, 0.5, 1.0, 2.0, 3.0};

std::string format_power(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  return buf;
}

std::string format_offset(double offset) {
  char buf[48];
  if (offset >= 0.0)
    std::snprintf(buf, sizeof(buf), "(x+%g)", offset);
  else
    std::snprintf(buf, sizeof(buf), "(x-%g)", -offset);
  return buf;
}

}  // namespace

FpPower::FpPower(double value) : value_(value) {
  if (std::find(kFullGrid.begin(), kFullGrid.end(), value) == kFullGrid.end())
    throw InvalidPower("power " + format_power(value) + " not on the admissible grid");
}

const std::vector<double>& FpPower::grid(Track track) {
  return track == Track::Full ? kFullGrid : kPositiveGrid;
}

FpBlock::FpBlock(std::vector<FpTerm> terms, Track track)
    : terms_(std::move(terms)), track_(track) {
  if (terms_.empty() || terms_.size() > 4)
    throw InvalidBlock("block must contain between 1 and 4 terms");
  const auto& grid = FpPower::grid(track_);
  std::set<double> seen;
  for (const auto& t : terms_) {
    if (std::find(grid.begin(), grid.end(), t.power.value()) == grid.end())
      throw InvalidBlock("power " + format_power(t.power.value()) +
                         " not admissible on this track");
    if (!seen.insert(t.power.value()).second)
      throw InvalidBlock("duplicate power " + format_power(t.power.value()) +
                         " in block (use repeated=true for a repeated power)");
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const FpTerm& a, const FpTerm& b) { return a.power < b.power; });
}

FpBlock FpBlock::from_powers(const std::vector<double>& powers, Track track) {
  std::vector<FpTerm> terms;
  terms.reserve(powers.size());
  for (double p : powers) terms.push_back({FpPower(p), false});
  return FpBlock(std::move(terms), track);
}

int FpBlock::column_count() const {
  int c = 0;
  for (const auto& t : terms_) c += t.column_count();
  return c;
}

std::string FpBlock::label() const {
  std::string out = "{";
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) out += ",";
    out += format_power(t.power.value());
    if (t.repeated) out += "," + format_power(t.power.value());
    first = false;
  }
  out += "}";
  return out;
}

Vector fp_transform(const Vector& x, FpPower p) {
  if (x.size() == 0) throw InvalidConfig("fp_transform: empty input");
  if ((x.array() <= 0.0).any())
    throw NonPositiveInput("fp_transform requires strictly positive inputs");

  const double v = p.value();
  Vector out(x.size());
  if (v == 0.0) {
    out = x.array().log();
  } else if (v == 1.0) {
    out = x;
  } else if (v == 2.0) {
    out = x.array().square();
  } else if (v == 3.0) {
    out = x.array().cube();
  } else if (v == 0.5) {
    out = x.array().sqrt();
  } else if (v == -0.5) {
    out = x.array().rsqrt();
  } else if (v == -1.0) {
    out = x.array().inverse();
  } else if (v == -2.0) {
    out = x.array().square().inverse();
  } else {
    out = x.array().pow(v);
  }
  return out;
}

ShiftResult shift_domain(const Vector& x, std::optional<double> offset) {
  if (x.size() == 0) throw InvalidConfig("shift_domain: empty input");
  if (offset.has_value()) return {x.array() + *offset, *offset};

  const double lo = x.minCoeff();
  if (lo > 0.0) return {x, 0.0};
  const double range = x.maxCoeff() - lo;
  const double delta = std::max(1.0, range / 100.0);
  const double off = -lo + delta;
  return {x.array() + off, off};
}

DesignMatrix build_design(const Vector& x, const FpBlock& block, double offset) {
  if ((x.array() <= 0.0).any())
    throw NonPositiveInput(
        "build_design requires strictly positive x; shift the domain first");

  DesignMatrix d;
  const auto n = x.size();
  d.values.resize(n, 1 + block.column_count());
  d.values.col(0).setOnes();
  d.column_labels.push_back("intercept");

  const std::string xs = offset == 0.0 ? "x" : format_offset(offset);
  const Vector logx = x.array().log();

  int c = 1;
  for (const auto& t : block.terms()) {
    const double p = t.power.value();
    Vector col = fp_transform(x, t.power);
    d.values.col(c) = col;
    d.column_labels.push_back(p == 0.0 ? "log(" + xs + ")"
                                       : xs + "^" + format_power(p));
    ++c;
    if (t.repeated) {
      d.values.col(c) = col.array() * logx.array();
      d.column_labels.push_back(p == 0.0
                                    ? "log(" + xs + ")^2"
                                    : xs + "^" + format_power(p) + "*log(" + xs + ")");
      ++c;
    }
  }
  return d;
}

std::vector<FpBlock> enumerate_blocks(Track track, EnumerationMode mode,
                                      int max_terms) {
  if (max_terms < 1 || max_terms > 4)
    throw InvalidConfig("enumerate_blocks: max_terms must be in 1..4");

  const auto& grid = FpPower::grid(track);
  const int g = static_cast<int>(grid.size());
  std::vector<FpBlock> out;

  if (mode == EnumerationMode::SubsetsUpTo4) {
    // Sizes ascending; within a size, lexicographic combinations over the
    // ascending grid.
    for (int size = 1; size <= max_terms; ++size) {
      std::vector<int> idx(size);
      for (int i = 0; i < size; ++i) idx[i] = i;
      for (;;) {
        std::vector<FpTerm> terms;
        terms.reserve(size);
        for (int i : idx) terms.push_back({FpPower(grid[i]), false});
        out.emplace_back(std::move(terms), track);

        int i = size - 1;
        while (i >= 0 && idx[i] == g - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    return out;
  }

  // RoystonAltmanDeg2: degree-1 singletons, then unordered degree-2
  // combinations with repetition ((p,p) encoded as one repeated term).
  for (int i = 0; i < g; ++i)
    out.emplace_back(std::vector<FpTerm>{{FpPower(grid[i]), false}}, track);
  if (max_terms >= 2) {
    for (int i = 0; i < g; ++i) {
      for (int j = i; j < g; ++j) {
        if (i == j) {
          out.emplace_back(std::vector<FpTerm>{{FpPower(grid[i]), true}}, track);
        } else {
          out.emplace_back(std::vector<FpTerm>{{FpPower(grid[i]), false},
                                               {FpPower(grid[j]), false}},
                           track);
        }
      }
    }
  }
  return out;
}

}  // namespace pmmfp
