#pragma once

#include <stdexcept>
#include <string>

namespace commchar {

// Base of every error raised by the library. `kind()` is a stable tag used
// in structured CLI messages.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define COMMCHAR_DEFINE_ERROR(Name)                                            \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  };

// network
COMMCHAR_DEFINE_ERROR(ParseError)
COMMCHAR_DEFINE_ERROR(SchemaError)
COMMCHAR_DEFINE_ERROR(ConsistencyError)
COMMCHAR_DEFINE_ERROR(IndexError)
// community
COMMCHAR_DEFINE_ERROR(EmptyGraph)
COMMCHAR_DEFINE_ERROR(PartitionMismatch)
// measures
COMMCHAR_DEFINE_ERROR(UnknownNode)
COMMCHAR_DEFINE_ERROR(UnassignedNode)
// mining
COMMCHAR_DEFINE_ERROR(EmptyCommunity)
COMMCHAR_DEFINE_ERROR(EmptyComplement)
COMMCHAR_DEFINE_ERROR(CommunityTooSmall)
COMMCHAR_DEFINE_ERROR(InvalidSupport)
COMMCHAR_DEFINE_ERROR(OracleTooLarge)
COMMCHAR_DEFINE_ERROR(PatternLimitExceeded)
// selection
COMMCHAR_DEFINE_ERROR(BothEmpty)
COMMCHAR_DEFINE_ERROR(NoPatterns)
// pipeline
COMMCHAR_DEFINE_ERROR(ConfigError)
COMMCHAR_DEFINE_ERROR(IoError)

#undef COMMCHAR_DEFINE_ERROR

}  // namespace commchar
