#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace krepair {

/// A point of the compact value space K.
///
/// For finite metric spaces the payload is a label index; for the interval
/// variants it is the real value itself, with +inf standing for the point at
/// infinity of the compactified ray.
class Value {
public:
    constexpr Value() = default;

    static constexpr Value label(std::size_t index) { return Value(static_cast<double>(index)); }
    static constexpr Value real(double x) { return Value(x); }
    static constexpr Value infinity() { return Value(std::numeric_limits<double>::infinity()); }

    constexpr double raw() const { return x_; }
    constexpr std::size_t label_index() const { return static_cast<std::size_t>(x_); }
    constexpr bool is_infinite() const { return x_ == std::numeric_limits<double>::infinity(); }

    friend constexpr bool operator==(Value, Value) = default;
    friend constexpr auto operator<=>(Value a, Value b) { return a.x_ <=> b.x_; }

private:
    constexpr explicit Value(double x) : x_(x) {}
    double x_ = 0.0;
};

// phi(t) = t / (1 + t), phi(inf) = 1; the compactifying chart of [0, inf].
double ray_chart(double t);
double ray_chart_inverse(double y);

/// The compact metric space K: a finite metric space, a bounded interval
/// [0, D], or the compactified ray [0, inf] metrised through `ray_chart`.
class ValueSpace {
public:
    enum class Variant { FiniteMetric, BoundedInterval, CompactifiedRay };

    // Zero off-diagonal distances merge labels: the later label becomes an
    // alias of the earlier one. Throws DomainError on asymmetry, a nonzero
    // diagonal, negative entries or a triangle violation.
    static ValueSpace finite_metric(std::vector<std::string> labels,
                                    std::vector<std::vector<double>> dist);
    // Discrete metric (all off-diagonal distances 1).
    static ValueSpace discrete(std::vector<std::string> labels);
    static ValueSpace bounded_interval(double diameter);
    static ValueSpace compactified_ray();

    Variant variant() const { return variant_; }
    bool contains(Value v) const;

    double dist(Value a, Value b) const;
    double tuple_dist(std::span<const Value> u, std::span<const Value> v) const;

    // Finite metric only.
    std::size_t label_count() const { return labels_.size(); }
    const std::string& label_name(std::size_t index) const { return labels_.at(index); }
    double min_positive_distance() const;
    const std::vector<std::vector<double>>& distance_matrix() const { return dist_; }
    const std::vector<std::pair<std::string, std::size_t>>& aliases() const { return aliases_; }

    double diameter() const { return diameter_; }

    // Labels of a finite space in index order; empty for the interval variants.
    std::vector<Value> finite_values() const;

    // Numeric reading of a value for arithmetic atoms. Finite labels must
    // spell a number; the point at infinity reads as +inf.
    double numeric(Value v) const;

    // Text form used in files: label name, decimal number, or "inf".
    std::string format(Value v) const;
    Value parse(std::string_view text) const;
    Value from_number(double x) const;

    // Helpers for per-atom epsilon relaxation. All balls are closed.
    // Smallest / largest numeric value reachable from v within eps.
    double numeric_floor_within(Value v, double eps) const;
    double numeric_ceil_within(Value v, double eps) const;
    bool can_reach_zero(Value v, double eps) const;
    // Some w with dist(a, w) <= eps and dist(b, w) <= eps exists.
    bool can_meet(Value a, Value b, double eps) const;
    bool can_be_finite(Value v, double eps) const;

    friend bool operator==(const ValueSpace&, const ValueSpace&) = default;

private:
    ValueSpace() = default;
    void require_member(Value v) const;

    Variant variant_ = Variant::BoundedInterval;
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> dist_;
    std::vector<std::pair<std::string, std::size_t>> aliases_;
    double diameter_ = 0.0;
};

struct Cell {
    double lower = 0.0; // interval variants: bin on the value (or chart) axis
    double upper = 0.0;
    std::vector<std::size_t> members; // finite metric: label indices
};

/// Partition of K into finitely many cells of diameter < epsilon; the cell
/// index is the Ramsey colour.
class CellPartition {
public:
    CellPartition(const ValueSpace& space, double epsilon);

    double epsilon() const { return epsilon_; }
    std::size_t size() const { return cells_.size(); }
    const std::vector<Cell>& cells() const { return cells_; }
    double bin_width() const { return width_; }

    std::size_t cell_of(Value v) const;

private:
    ValueSpace::Variant variant_;
    double epsilon_;
    double width_ = 0.0;
    std::vector<Cell> cells_;
    std::vector<std::size_t> label_cell_;
};

CellPartition epsilon_partition(const ValueSpace& space, double epsilon);

} // namespace krepair
