#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace sgkdv {

using complex = std::complex<double>;

// Periodic grid of n points on [-L/2, L/2). Frequencies are stored in the
// transform's native order: modes 0, 1, ..., n/2-1, -n/2, ..., -1.
class Grid {
public:
    Grid(std::size_t n, double length);

    std::size_t n() const { return n_; }
    double length() const { return length_; }
    double spacing() const { return length_ / static_cast<double>(n_); }
    double point(std::size_t j) const;
    std::vector<double> points() const;

    // Signed mode number m with xi = 2 pi m / L.
    long mode(std::size_t j) const;
    const std::vector<double>& frequencies() const { return xi_; }
    double frequency(std::size_t j) const { return xi_[j]; }
    std::size_t nyquist_index() const { return n_ / 2; }

    bool operator==(const Grid& other) const { return n_ == other.n_ && length_ == other.length_; }

private:
    std::size_t n_;
    double length_;
    std::vector<double> xi_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(std::size_t n, double length);

bool same_grid(const GridPtr& a, const GridPtr& b);

struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(GridPtr g);
    Field(GridPtr g, std::vector<double> v);
    static Field sample(GridPtr g, const std::function<double(double)>& f);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }
    double& operator[](std::size_t j) { return values[j]; }

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

struct SpectralField {
    GridPtr grid;
    std::vector<complex> coefficients;
};

}  // namespace sgkdv
