#include "krepair/value_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "krepair/errors.hpp"
#include "krepair/rational.hpp"

namespace krepair {

double ray_chart(double t)
{
    if (std::isinf(t))
        return 1.0;
    return t / (1.0 + t);
}

double ray_chart_inverse(double y)
{
    if (y >= 1.0)
        return std::numeric_limits<double>::infinity();
    return y / (1.0 - y);
}

ValueSpace ValueSpace::finite_metric(std::vector<std::string> labels,
                                     std::vector<std::vector<double>> dist)
{
    const std::size_t n = labels.size();
    if (n == 0)
        throw DomainError("finite metric space needs at least one label");
    if (dist.size() != n)
        throw DomainError("distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (const auto& row : dist)
        if (row.size() != n)
            throw DomainError("distance matrix must be square");

    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i][i] != 0.0)
            throw DomainError("nonzero diagonal at label '" + labels[i] + "'");
        for (std::size_t j = 0; j < n; ++j) {
            if (!(dist[i][j] >= 0.0) || std::isinf(dist[i][j]))
                throw DomainError("distances must be finite and nonnegative");
            if (dist[i][j] != dist[j][i])
                throw DomainError("distance matrix is not symmetric at ('" + labels[i] + "', '"
                                  + labels[j] + "')");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l)
                if (dist[i][l] > dist[i][j] + dist[j][l])
                    throw DomainError("triangle inequality fails for ('" + labels[i] + "', '"
                                      + labels[j] + "', '" + labels[l] + "')");

    // Merge points at distance zero.
    std::vector<std::size_t> keep;
    std::vector<std::pair<std::string, std::size_t>> aliases;
    for (std::size_t i = 0; i < n; ++i) {
        auto twin = std::find_if(keep.begin(), keep.end(),
                                 [&](std::size_t j) { return dist[i][j] == 0.0; });
        if (twin == keep.end())
            keep.push_back(i);
        else
            aliases.emplace_back(labels[i], static_cast<std::size_t>(twin - keep.begin()));
    }

    ValueSpace space;
    space.variant_ = Variant::FiniteMetric;
    for (std::size_t i : keep) {
        space.labels_.push_back(labels[i]);
        std::vector<double> row;
        for (std::size_t j : keep)
            row.push_back(dist[i][j]);
        space.dist_.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < space.labels_.size(); ++i)
        for (std::size_t j = 0; j < space.labels_.size(); ++j)
            space.diameter_ = std::max(space.diameter_, space.dist_[i][j]);
    space.aliases_ = std::move(aliases);
    return space;
}

ValueSpace ValueSpace::discrete(std::vector<std::string> labels)
{
    const std::size_t n = labels.size();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        dist[i][i] = 0.0;
    return finite_metric(std::move(labels), std::move(dist));
}

ValueSpace ValueSpace::bounded_interval(double diameter)
{
    if (!(diameter >= 0.0) || std::isinf(diameter))
        throw DomainError("interval diameter must be finite and nonnegative");
    ValueSpace space;
    space.variant_ = Variant::BoundedInterval;
    space.diameter_ = diameter;
    return space;
}

ValueSpace ValueSpace::compactified_ray()
{
    ValueSpace space;
    space.variant_ = Variant::CompactifiedRay;
    space.diameter_ = 1.0;
    return space;
}

bool ValueSpace::contains(Value v) const
{
    switch (variant_) {
    case Variant::FiniteMetric:
        return v.raw() >= 0.0 && v.raw() == std::floor(v.raw()) && v.label_index() < labels_.size();
    case Variant::BoundedInterval:
        return v.raw() >= 0.0 && v.raw() <= diameter_;
    case Variant::CompactifiedRay:
        return v.raw() >= 0.0;
    }
    return false;
}

void ValueSpace::require_member(Value v) const
{
    if (!contains(v)) {
        std::ostringstream msg;
        msg << "value " << v.raw() << " is outside the value space";
        throw DomainError(msg.str());
    }
}

double ValueSpace::dist(Value a, Value b) const
{
    require_member(a);
    require_member(b);
    switch (variant_) {
    case Variant::FiniteMetric:
        return dist_[a.label_index()][b.label_index()];
    case Variant::BoundedInterval:
        return std::abs(a.raw() - b.raw());
    case Variant::CompactifiedRay:
        return std::abs(ray_chart(a.raw()) - ray_chart(b.raw()));
    }
    return 0.0;
}

double ValueSpace::tuple_dist(std::span<const Value> u, std::span<const Value> v) const
{
    if (u.size() != v.size() || u.empty())
        throw ContractError("tuple_dist needs two nonempty tuples of equal length");
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        worst = std::max(worst, dist(u[i], v[i]));
    return worst;
}

double ValueSpace::min_positive_distance() const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dist_.size(); ++i)
        for (std::size_t j = 0; j < dist_.size(); ++j)
            if (i != j)
                best = std::min(best, dist_[i][j]);
    return best;
}

std::vector<Value> ValueSpace::finite_values() const
{
    std::vector<Value> out;
    for (std::size_t i = 0; i < labels_.size(); ++i)
        out.push_back(Value::label(i));
    return out;
}

double ValueSpace::numeric(Value v) const
{
    require_member(v);
    if (variant_ != Variant::FiniteMetric)
        return v.raw();
    const std::string& name = labels_[v.label_index()];
    try {
        return to_double(parse_rational(name));
    } catch (const FormatError&) {
        throw DomainError("label '" + name + "' has no numeric reading");
    }
}

std::string ValueSpace::format(Value v) const
{
    require_member(v);
    if (variant_ == Variant::FiniteMetric)
        return labels_[v.label_index()];
    if (v.is_infinite())
        return "inf";
    char buf[32];
    auto end = std::to_chars(buf, buf + sizeof buf, v.raw()).ptr;
    return std::string(buf, end);
}

Value ValueSpace::parse(std::string_view text) const
{
    if (variant_ == Variant::FiniteMetric) {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == text)
                return Value::label(i);
        for (const auto& [alias, index] : aliases_)
            if (alias == text)
                return Value::label(index);
        throw DomainError("unknown label '" + std::string(text) + "'");
    }
    if (text == "inf" || text == "infinity") {
        if (variant_ != Variant::CompactifiedRay)
            throw DomainError("infinite value outside the compactified ray");
        return Value::infinity();
    }
    return from_number(to_double(parse_rational(text)));
}

Value ValueSpace::from_number(double x) const
{
    if (variant_ == Variant::FiniteMetric) {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            try {
                if (to_double(parse_rational(labels_[i])) == x)
                    return Value::label(i);
            } catch (const FormatError&) {
            }
        }
        throw DomainError("no label reads as " + std::to_string(x));
    }
    Value v = Value::real(x);
    require_member(v);
    return v;
}

double ValueSpace::numeric_floor_within(Value v, double eps) const
{
    require_member(v);
    switch (variant_) {
    case Variant::FiniteMetric: {
        double best = numeric(v);
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (dist_[v.label_index()][i] <= eps)
                best = std::min(best, numeric(Value::label(i)));
        return best;
    }
    case Variant::BoundedInterval:
        return std::max(0.0, v.raw() - eps);
    case Variant::CompactifiedRay:
        return ray_chart_inverse(std::max(0.0, ray_chart(v.raw()) - eps));
    }
    return v.raw();
}

double ValueSpace::numeric_ceil_within(Value v, double eps) const
{
    require_member(v);
    switch (variant_) {
    case Variant::FiniteMetric: {
        double best = numeric(v);
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (dist_[v.label_index()][i] <= eps)
                best = std::max(best, numeric(Value::label(i)));
        return best;
    }
    case Variant::BoundedInterval:
        return std::min(diameter_, v.raw() + eps);
    case Variant::CompactifiedRay:
        return ray_chart_inverse(std::min(1.0, ray_chart(v.raw()) + eps));
    }
    return v.raw();
}

bool ValueSpace::can_reach_zero(Value v, double eps) const
{
    require_member(v);
    if (variant_ == Variant::FiniteMetric) {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (dist_[v.label_index()][i] <= eps && numeric(Value::label(i)) == 0.0)
                return true;
        return false;
    }
    return numeric_floor_within(v, eps) == 0.0;
}

bool ValueSpace::can_meet(Value a, Value b, double eps) const
{
    require_member(a);
    require_member(b);
    if (variant_ == Variant::FiniteMetric) {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (dist_[a.label_index()][i] <= eps && dist_[b.label_index()][i] <= eps)
                return true;
        return false;
    }
    // Geodesic: the midpoint (in the chart for the ray) is a member of K.
    return dist(a, b) <= 2.0 * eps;
}

bool ValueSpace::can_be_finite(Value v, double eps) const
{
    require_member(v);
    return !v.is_infinite() || eps > 0.0;
}

CellPartition::CellPartition(const ValueSpace& space, double epsilon)
    : variant_(space.variant()), epsilon_(epsilon)
{
    if (!(epsilon > 0.0))
        throw ContractError("epsilon must be positive");

    if (variant_ == ValueSpace::Variant::FiniteMetric) {
        const std::size_t n = space.label_count();
        label_cell_.assign(n, n);
        if (epsilon <= space.min_positive_distance()) {
            for (std::size_t i = 0; i < n; ++i) {
                label_cell_[i] = i;
                cells_.push_back(Cell{0.0, 0.0, {i}});
            }
            return;
        }
        // Greedy covering by balls of radius < eps/2 around the first free label.
        const auto& d = space.distance_matrix();
        for (std::size_t centre = 0; centre < n; ++centre) {
            if (label_cell_[centre] != n)
                continue;
            Cell cell;
            for (std::size_t j = 0; j < n; ++j)
                if (label_cell_[j] == n && d[centre][j] < epsilon / 2.0) {
                    label_cell_[j] = cells_.size();
                    cell.members.push_back(j);
                }
            cells_.push_back(std::move(cell));
        }
        return;
    }

    width_ = epsilon / 2.0;
    const double span = variant_ == ValueSpace::Variant::BoundedInterval ? space.diameter() : 1.0;
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / width_)));
    for (std::size_t i = 0; i < count; ++i)
        cells_.push_back(Cell{width_ * static_cast<double>(i),
                              std::min(span, width_ * static_cast<double>(i + 1)), {}});
}

std::size_t CellPartition::cell_of(Value v) const
{
    if (variant_ == ValueSpace::Variant::FiniteMetric) {
        if (v.label_index() >= label_cell_.size())
            throw DomainError("label outside the partitioned space");
        return label_cell_[v.label_index()];
    }
    const double coordinate = variant_ == ValueSpace::Variant::CompactifiedRay ? ray_chart(v.raw()) : v.raw();
    if (coordinate < 0.0)
        throw DomainError("negative value has no cell");
    const auto bin = static_cast<std::size_t>(std::floor(coordinate / width_));
    return std::min(bin, cells_.size() - 1);
}

CellPartition epsilon_partition(const ValueSpace& space, double epsilon)
{
    return CellPartition(space, epsilon);
}

} // namespace krepair
