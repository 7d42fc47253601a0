// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <stdexcept>
#include <string>

namespace pmmfp {

// Base class for every failure the toolkit raises on purpose. Callers that
// want blanket handling (bootstrap loops, candidate sweeps) catch this type;
// anything else escaping a fit is a genuine bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PMMFP_DEFINE_ERROR(NAME)           \
  class NAME : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

// fp_basis
PMMFP_DEFINE_ERROR(NonPositiveInput);
PMMFP_DEFINE_ERROR(InvalidPower);
PMMFP_DEFINE_ERROR(InvalidBlock);

// numeric_core
PMMFP_DEFINE_ERROR(RankDeficient);
PMMFP_DEFINE_ERROR(SingularSystem);
PMMFP_DEFINE_ERROR(NotSymmetric);

// moments
PMMFP_DEFINE_ERROR(TooFewObservations);
PMMFP_DEFINE_ERROR(DegenerateVariance);
PMMFP_DEFINE_ERROR(InvalidKurtosis);
PMMFP_DEFINE_ERROR(UnsupportedLaw);

// estimators
PMMFP_DEFINE_ERROR(NonFiniteScore);

// score_formb
PMMFP_DEFINE_ERROR(ZeroResidual);
PMMFP_DEFINE_ERROR(SingularCorrelant);
PMMFP_DEFINE_ERROR(UnstableBasis);

// selection
PMMFP_DEFINE_ERROR(PerfectFit);
PMMFP_DEFINE_ERROR(AllCandidatesFailed);
PMMFP_DEFINE_ERROR(InsufficientCandidates);

// resampling
PMMFP_DEFINE_ERROR(TooManyFailures);

// cli / io
PMMFP_DEFINE_ERROR(FileNotFound);
PMMFP_DEFINE_ERROR(ColumnMissing);
PMMFP_DEFINE_ERROR(NonPositiveCovariate);
PMMFP_DEFINE_ERROR(UnknownExperiment);
PMMFP_DEFINE_ERROR(InvalidConfig);

#undef PMMFP_DEFINE_ERROR

}  // namespace pmmfp
