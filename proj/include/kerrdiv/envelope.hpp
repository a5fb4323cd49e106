#pragma once

#include <functional>
#include <string>

namespace kerrdiv {

/// Wavepacket envelope in the slow variable: the field uses A(eps * x2).
/// The envelope itself does not depend on eps; sweeps vary eps only.
struct Envelope {
    std::function<double(double)> value;
    std::function<double(double)> deriv;

    /// A(y) = exp(-width y^2). Default width matches the reference runs.
    static Envelope gaussian(double width = 5e6);
    static Envelope zero();
    static Envelope constant(double c);
    static Envelope from_expression(const std::string& text);
};

} // namespace kerrdiv
