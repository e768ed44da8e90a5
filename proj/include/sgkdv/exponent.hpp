#pragma once

#include <string>

namespace sgkdv {

// Lebesgue exponent in [1, inf]; infinity is kept symbolic.
class Exponent {
public:
    Exponent(double value);  // NOLINT: implicit from finite values is convenient
    static Exponent infinity();
    static Exponent parse(const std::string& text);

    bool is_infinite() const { return infinite_; }
    double value() const;
    // 1/p, exactly 0 for p = inf.
    double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }
    std::string str() const;

    friend bool operator==(const Exponent& a, const Exponent& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

private:
    Exponent() = default;
    double value_ = 0.0;
    bool infinite_ = false;
};

inline const Exponent kInf = Exponent::infinity();

}  // namespace sgkdv
