#ifndef GEVREY_NS_ERRORS_HPP
#define GEVREY_NS_ERRORS_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace gevrey_ns {

/// Invalid parameters, malformed config, precondition failures.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fields defined on different grids were combined.
class grid_mismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Time integration produced a non-finite state or left its stability region.
class integration_error : public std::runtime_error {
public:
    integration_error(const std::string& what, double t, double dt)
        : std::runtime_error(format(what, t, dt)), t_(t), dt_(dt)
    {
    }

    double time() const noexcept { return t_; }
    double step() const noexcept { return dt_; }

private:
    static std::string format(const std::string& what, double t, double dt)
    {
        std::ostringstream os;
        os.precision(17);
        os << what << " (t=" << t << ", dt=" << dt << ")";
        return os.str();
    }

    double t_;
    double dt_;
};

} // namespace gevrey_ns

#endif
