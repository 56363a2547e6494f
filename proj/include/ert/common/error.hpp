#pragma once

#include <stdexcept>
#include <string>

namespace ert {

// Base class for every failure the harness reports. Callers that only need
// to distinguish "harness error" from programming errors catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ERT_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

ERT_DEFINE_ERROR(GenerationError);     // scenario sampler gave up
ERT_DEFINE_ERROR(ParseError);          // instruction text has no usable structure
ERT_DEFINE_ERROR(AttackNotApplicable); // attack cannot act on this input
ERT_DEFINE_ERROR(RephraseError);       // external rephraser failed
ERT_DEFINE_ERROR(TransportError);      // HTTP / pipe / socket failure
ERT_DEFINE_ERROR(ProtocolError);       // malformed bridge message
ERT_DEFINE_ERROR(VictimError);         // external victim unusable for this episode
ERT_DEFINE_ERROR(SelectionError);      // no admissible attack candidate
ERT_DEFINE_ERROR(CampaignError);       // campaign produced nothing usable
ERT_DEFINE_ERROR(DefenseUnavailable);  // external restorer failed
ERT_DEFINE_ERROR(ReportError);
ERT_DEFINE_ERROR(ConfigError);
ERT_DEFINE_ERROR(DimensionMismatch);

#undef ERT_DEFINE_ERROR

}  // namespace ert
