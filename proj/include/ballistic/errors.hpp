#pragma once

#include <stdexcept>
#include <string>

namespace ballistic {

/// Base class for all typed errors; `name()` is stable and machine-readable
/// (the CLI prints it on stderr and exits 3).
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

#define BALLISTIC_DEFINE_ERROR(E)                                        \
    class E : public Error {                                             \
    public:                                                              \
        explicit E(const std::string& what) : Error(#E, what) {}         \
    }

BALLISTIC_DEFINE_ERROR(EmptyInput);
BALLISTIC_DEFINE_ERROR(OverlapError);
BALLISTIC_DEFINE_ERROR(InternalInvariantError);
BALLISTIC_DEFINE_ERROR(ArcCollapse);
BALLISTIC_DEFINE_ERROR(DomainError);
BALLISTIC_DEFINE_ERROR(QuadratureFailure);
BALLISTIC_DEFINE_ERROR(InsufficientData);
BALLISTIC_DEFINE_ERROR(WindowEmpty);
BALLISTIC_DEFINE_ERROR(InsufficientSurvivors);
BALLISTIC_DEFINE_ERROR(InsufficientTail);
BALLISTIC_DEFINE_ERROR(DegeneratePolygon);
BALLISTIC_DEFINE_ERROR(ConfigurationError);
BALLISTIC_DEFINE_ERROR(IoError);

#undef BALLISTIC_DEFINE_ERROR

} // namespace ballistic
