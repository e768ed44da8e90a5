#include "sgkdv/exponent.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "sgkdv/error.hpp"

namespace sgkdv {

Exponent::Exponent(double value) : value_(value) {
    if (!std::isfinite(value)) throw InvalidArgument("exponent must be finite; use Exponent::infinity()");
}

Exponent Exponent::infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
}

Exponent Exponent::parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Infinity") return infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse exponent '" + text + "'");
    }
    if (used != text.size()) throw InvalidArgument("cannot parse exponent '" + text + "'");
    return Exponent(v);
}

double Exponent::value() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

std::string Exponent::str() const {
    if (infinite_) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << value_;
    return os.str();
}

}  // namespace sgkdv
