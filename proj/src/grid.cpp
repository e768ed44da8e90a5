#include "sgkdv/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sgkdv/error.hpp"

namespace sgkdv {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(std::size_t n, double length) : n_(n), length_(length) {
    if (!is_power_of_two(n) || n < 8)
        throw InvalidArgument("grid size must be a power of two >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidArgument("grid length must be positive and finite");
    xi_.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        xi_[j] = 2.0 * std::numbers::pi * static_cast<double>(mode(j)) / length;
}

double Grid::point(std::size_t j) const {
    return -0.5 * length_ + static_cast<double>(j) * spacing();
}

std::vector<double> Grid::points() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = point(j);
    return x;
}

long Grid::mode(std::size_t j) const {
    const auto half = static_cast<long>(n_ / 2);
    const auto jj = static_cast<long>(j);
    return jj < half ? jj : jj - static_cast<long>(n_);
}

GridPtr make_grid(std::size_t n, double length) { return std::make_shared<const Grid>(n, length); }

bool same_grid(const GridPtr& a, const GridPtr& b) {
    if (!a || !b) return false;
    return a == b || *a == *b;
}

Field::Field(GridPtr g) : grid(std::move(g)) {
    require(grid != nullptr, "field needs a grid");
    values.assign(grid->n(), 0.0);
}

Field::Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    require(grid != nullptr, "field needs a grid");
    require(values.size() == grid->n(), "field size does not match grid");
}

Field Field::sample(GridPtr g, const std::function<double(double)>& f) {
    Field out(std::move(g));
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = f(out.grid->point(j));
    return out;
}

Field& Field::operator+=(const Field& other) {
    require(same_grid(grid, other.grid), "field grids differ");
    for (std::size_t j = 0; j < values.size(); ++j) values[j] += other.values[j];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require(same_grid(grid, other.grid), "field grids differ");
    for (std::size_t j = 0; j < values.size(); ++j) values[j] -= other.values[j];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

}  // namespace sgkdv
