// errors.hpp
// Exception types raised by the simulator, the protocol drivers and the CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace phecp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PHECP_DEFINE_ERROR(Name)        \
    class Name : public Error {         \
    public:                             \
        using Error::Error;             \
    }

// fock
PHECP_DEFINE_ERROR(ZeroVector);
PHECP_DEFINE_ERROR(BadOccupation);
PHECP_DEFINE_ERROR(ModeCollision);
PHECP_DEFINE_ERROR(ModeMismatch);
PHECP_DEFINE_ERROR(ModesNotVacuum);

// ops
PHECP_DEFINE_ERROR(KindMismatch);
PHECP_DEFINE_ERROR(CutoffOverflow);
PHECP_DEFINE_ERROR(QubitViolation);
PHECP_DEFINE_ERROR(CavityNotEmpty);
PHECP_DEFINE_ERROR(InvalidParameter);

// protocol / analysis
PHECP_DEFINE_ERROR(HeraldFailed);
PHECP_DEFINE_ERROR(NotNormalized);
PHECP_DEFINE_ERROR(NoOptimum);
PHECP_DEFINE_ERROR(DegenerateParams);

// cli
PHECP_DEFINE_ERROR(ParseError);
PHECP_DEFINE_ERROR(ValidationError);
PHECP_DEFINE_ERROR(IoError);

#undef PHECP_DEFINE_ERROR

}  // namespace phecp
