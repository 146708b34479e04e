#include "krepair/ramsey.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "krepair/combinatorics.hpp"
#include "krepair/errors.hpp"
#include "krepair/rng.hpp"

namespace krepair {

const char* to_string(RamseyStatus status)
{
    switch (status) {
    case RamseyStatus::Found:
        return "found";
    case RamseyStatus::NotFound:
        return "not_found";
    case RamseyStatus::BudgetExhausted:
        return "budget_exhausted";
    }
    return "not_found";
}

void RamseyInstance::validate() const
{
    const std::size_t nu = parts.size();
    if (nu == 0)
        throw ContractError("ramsey instance needs at least one part");
    if (sizes.size() != nu || targets.size() != nu)
        throw ContractError("ramsey instance: sizes and targets must list one entry per part");
    if (!coloring)
        throw ContractError("ramsey instance has no colouring");
    std::set<Element> seen;
    for (std::size_t i = 0; i < nu; ++i) {
        for (Element e : parts[i])
            if (!seen.insert(e).second)
                throw ContractError("ramsey parts are not disjoint (element " + std::to_string(e) + ")");
        if (sizes[i] < 1 || sizes[i] > targets[i] || targets[i] > parts[i].size())
            throw ContractError("ramsey instance needs 1 <= k_i <= N_i <= R_i in part " + std::to_string(i + 1));
    }
}

namespace {

class ExtractionSearch {
public:
    enum class Outcome { Found, Exhausted, OutOfBudget };

    ExtractionSearch(const RamseyInstance& instance, std::vector<std::vector<Element>> order, std::uint64_t budget)
        : instance_(instance), order_(std::move(order)), budget_(budget), chosen_(order_.size())
    {
    }

    Outcome run() { return descend(0, 0); }

    std::uint64_t nodes() const { return nodes_; }

    Extraction extraction() const
    {
        Extraction out{chosen_, color_.value_or(0)};
        for (auto& s : out.subsets)
            std::sort(s.begin(), s.end());
        return out;
    }

private:
    Outcome descend(std::size_t part, std::size_t from)
    {
        const auto& targets = instance_.targets;
        if (chosen_[part].size() == targets[part]) {
            if (part + 1 == order_.size())
                return Outcome::Found;
            return descend(part + 1, 0);
        }
        const std::size_t need = targets[part] - chosen_[part].size();
        const std::size_t avail = order_[part].size();
        for (std::size_t idx = from; idx + need <= avail; ++idx) {
            if (++nodes_ > budget_)
                return Outcome::OutOfBudget;
            chosen_[part].push_back(order_[part][idx]);
            const bool had_color = color_.has_value();
            if (consistent(part)) {
                Outcome below = descend(part, idx + 1);
                if (below != Outcome::Exhausted)
                    return below;
            }
            if (!had_color)
                color_.reset();
            chosen_[part].pop_back();
        }
        return Outcome::Exhausted;
    }

    // Checks every array completed by the element just appended to `part`.
    // Arrays complete only once all earlier parts are full, i.e. in the last part.
    bool consistent(std::size_t part)
    {
        if (part + 1 != order_.size())
            return true;
        const auto& sizes = instance_.sizes;
        const auto& last = chosen_[part];
        if (last.size() < sizes[part])
            return true;

        // Blocks for earlier parts: all k_q-subsets; last part: subsets containing the new element.
        std::vector<std::vector<std::vector<Element>>> options(order_.size());
        for (std::size_t q = 0; q < part; ++q)
            options[q] = subsets_of(chosen_[q], sizes[q]);
        std::vector<Element> prior(last.begin(), last.end() - 1);
        for (auto block : subsets_of(prior, sizes[part] - 1)) {
            block.push_back(last.back());
            options[part].push_back(std::move(block));
        }

        std::vector<std::size_t> pick(order_.size(), 0);
        Array array(order_.size());
        while (true) {
            for (std::size_t q = 0; q < array.size(); ++q) {
                array[q] = options[q][pick[q]];
                std::sort(array[q].begin(), array[q].end());
            }
            const Color c = instance_.coloring(array);
            if (!color_)
                color_ = c;
            else if (*color_ != c)
                return false;
            std::size_t q = array.size();
            while (q > 0 && pick[q - 1] + 1 == options[q - 1].size()) {
                pick[q - 1] = 0;
                --q;
            }
            if (q == 0)
                return true;
            ++pick[q - 1];
        }
    }

    static std::vector<std::vector<Element>> subsets_of(const std::vector<Element>& from, std::size_t r)
    {
        std::vector<std::vector<Element>> out;
        if (r > from.size())
            return out;
        std::vector<std::size_t> c(r);
        for (std::size_t i = 0; i < r; ++i)
            c[i] = i;
        do {
            std::vector<Element> s;
            for (std::size_t i : c)
                s.push_back(from[i]);
            out.push_back(std::move(s));
        } while (r > 0 && next_combination(c, from.size()));
        return out;
    }

    const RamseyInstance& instance_;
    std::vector<std::vector<Element>> order_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::vector<Element>> chosen_;
    std::optional<Color> color_;
};

} // namespace

RamseyOutcome ramsey_extract(const RamseyInstance& instance, const Strategy& strategy)
{
    instance.validate();
    RamseyOutcome outcome;

    if (const auto* exhaustive = std::get_if<ExhaustiveStrategy>(&strategy)) {
        ExtractionSearch search(instance, instance.parts, exhaustive->budget);
        auto result = search.run();
        outcome.nodes = search.nodes();
        if (result == ExtractionSearch::Outcome::Found) {
            outcome.status = RamseyStatus::Found;
            outcome.extraction = search.extraction();
        } else if (result == ExtractionSearch::Outcome::Exhausted) {
            outcome.status = RamseyStatus::NotFound;
            outcome.proven = true;
        } else {
            outcome.status = RamseyStatus::BudgetExhausted;
        }
        return outcome;
    }

    const auto& randomized = std::get<RandomizedStrategy>(strategy);
    bool any_budget_hit = false;
    for (std::size_t restart = 0; restart < randomized.restarts; ++restart) {
        Rng rng = make_stream(randomized.seed, restart);
        auto order = instance.parts;
        for (auto& part : order)
            std::shuffle(part.begin(), part.end(), rng);
        ExtractionSearch search(instance, std::move(order), randomized.budget_per_restart);
        auto result = search.run();
        outcome.nodes += search.nodes();
        if (result == ExtractionSearch::Outcome::Found) {
            outcome.status = RamseyStatus::Found;
            outcome.extraction = search.extraction();
            return outcome;
        }
        if (result == ExtractionSearch::Outcome::Exhausted) {
            // A restart that finished its tree explored every candidate.
            outcome.status = RamseyStatus::NotFound;
            outcome.proven = true;
            return outcome;
        }
        any_budget_hit = true;
    }
    outcome.status = any_budget_hit ? RamseyStatus::BudgetExhausted : RamseyStatus::NotFound;
    return outcome;
}

namespace {

// Gosper's hack over bitmasks of `count` elements with popcount r.
template <typename Visit>
bool for_each_mask(std::size_t count, std::size_t r, Visit&& visit)
{
    if (count > 63)
        throw ContractError("checker enumerates at most 63 elements per set");
    if (r > count)
        return true;
    if (r == 0)
        return visit(std::uint64_t{0});
    std::uint64_t mask = (std::uint64_t{1} << r) - 1;
    const std::uint64_t limit = std::uint64_t{1} << count;
    while (mask < limit) {
        if (!visit(mask))
            return false;
        const std::uint64_t low = mask & (~mask + 1);
        const std::uint64_t ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    return true;
}

std::vector<Element> select(const std::vector<Element>& from, std::uint64_t mask)
{
    std::vector<Element> out;
    for (std::size_t i = 0; i < from.size(); ++i)
        if (mask >> i & 1)
            out.push_back(from[i]);
    return out;
}

bool check_arrays(const RamseyInstance& instance, const std::vector<std::vector<Element>>& sets, Array& array,
                  std::size_t part, Color expected)
{
    if (part == sets.size())
        return instance.coloring(array) == expected;
    return for_each_mask(sets[part].size(), instance.sizes[part], [&](std::uint64_t mask) {
        array[part] = select(sets[part], mask);
        return check_arrays(instance, sets, array, part + 1, expected);
    });
}

} // namespace

bool verify_extraction(const RamseyInstance& instance, const Extraction& extraction)
{
    const std::size_t nu = instance.parts.size();
    if (extraction.subsets.size() != nu)
        return false;
    std::vector<std::vector<Element>> sets;
    for (std::size_t i = 0; i < nu; ++i) {
        std::set<Element> part(instance.parts[i].begin(), instance.parts[i].end());
        std::set<Element> chosen(extraction.subsets[i].begin(), extraction.subsets[i].end());
        if (chosen.size() != extraction.subsets[i].size() || chosen.size() != instance.targets[i])
            return false;
        for (Element e : chosen)
            if (!part.contains(e))
                return false;
        sets.emplace_back(chosen.begin(), chosen.end());
    }
    Array array(nu);
    return check_arrays(instance, sets, array, 0, extraction.color);
}

std::vector<TypeVector> enumerate_types(std::size_t parts, std::size_t k)
{
    std::vector<TypeVector> out;
    if (parts == 0)
        return out;
    TypeVector type(parts, 0);
    // Odometer over [0..k]^parts keeps lexicographic order.
    while (true) {
        std::size_t sum = 0;
        for (std::size_t c : type)
            sum += c;
        if (sum == k)
            out.push_back(type);
        std::size_t i = parts;
        while (i > 0 && type[i - 1] == k) {
            type[i - 1] = 0;
            --i;
        }
        if (i == 0)
            break;
        ++type[i - 1];
    }
    return out;
}

namespace {

// Sweeps every k-subset of the union of `sets`, recording the colour seen for
// each type. Returns the first type met with two colours, if any.
std::optional<TypeVector> type_conflict(const std::vector<std::vector<Element>>& sets, std::size_t k,
                                        const SubsetColoring& coloring,
                                        std::vector<std::pair<TypeVector, Color>>* colors)
{
    std::vector<std::pair<Element, std::size_t>> tagged;
    for (std::size_t z = 0; z < sets.size(); ++z)
        for (Element e : sets[z])
            tagged.emplace_back(e, z);
    std::sort(tagged.begin(), tagged.end());
    std::map<TypeVector, Color> seen;
    if (k <= tagged.size()) {
        std::vector<std::size_t> c(k);
        for (std::size_t i = 0; i < k; ++i)
            c[i] = i;
        std::vector<Element> subset(k);
        TypeVector type(sets.size());
        do {
            std::fill(type.begin(), type.end(), 0);
            for (std::size_t i = 0; i < k; ++i) {
                subset[i] = tagged[c[i]].first;
                ++type[tagged[c[i]].second];
            }
            const Color color = coloring(subset);
            auto [it, fresh] = seen.emplace(type, color);
            if (!fresh && it->second != color)
                return type;
        } while (k > 0 && next_combination(c, tagged.size()));
    }
    if (colors)
        colors->assign(seen.begin(), seen.end());
    return std::nullopt;
}

Strategy pass_strategy(const Strategy& base, std::size_t pass, std::size_t attempt)
{
    if (const auto* randomized = std::get_if<RandomizedStrategy>(&base)) {
        RandomizedStrategy s = *randomized;
        s.seed = derive_seed(randomized->seed, pass * 1024 + attempt);
        return s;
    }
    return base;
}

} // namespace

MultiTypeOutcome multi_type_extract(const std::vector<std::vector<Element>>& parts, std::size_t k,
                                    const SubsetColoring& coloring, std::size_t target,
                                    const Strategy& strategy)
{
    if (parts.empty())
        throw ContractError("multi_type_extract needs at least one part");
    if (k == 0 || target < k)
        throw ContractError("multi_type_extract needs 1 <= k <= target");
    for (const auto& part : parts)
        if (part.size() < target)
            throw ContractError("every part needs at least `target` elements");

    MultiTypeOutcome outcome;
    MultiTypeExtraction result;
    std::vector<std::vector<Element>> candidates = parts;
    for (auto& c : candidates)
        std::sort(c.begin(), c.end());

    if (!type_conflict(candidates, k, coloring, nullptr)) {
        result.passes = 1;
    } else {
        const auto types = enumerate_types(parts.size(), k);
        for (std::size_t pass = 0; pass < types.size(); ++pass) {
            const TypeVector& type = types[pass];
            result.pass_order.push_back(type);
            ++result.passes;

            std::vector<std::size_t> involved;
            for (std::size_t z = 0; z < parts.size(); ++z)
                if (type[z] > 0)
                    involved.push_back(z);

            RamseyInstance instance;
            for (std::size_t z : involved) {
                instance.parts.push_back(candidates[z]);
                instance.sizes.push_back(type[z]);
            }
            instance.coloring = [&coloring](const Array& array) {
                std::vector<Element> joined;
                for (const auto& block : array)
                    joined.insert(joined.end(), block.begin(), block.end());
                std::sort(joined.begin(), joined.end());
                return coloring(joined);
            };

            std::size_t size = candidates[involved.front()].size();
            for (std::size_t z : involved)
                size = std::min(size, candidates[z].size());
            bool done = false;
            for (std::size_t attempt = 0; !done; ++attempt) {
                instance.targets.assign(involved.size(), size);
                auto found = ramsey_extract(instance, pass_strategy(strategy, pass, attempt));
                outcome.nodes += found.nodes;
                if (found.status == RamseyStatus::Found) {
                    for (std::size_t i = 0; i < involved.size(); ++i)
                        candidates[involved[i]] = found.extraction->subsets[i];
                    done = true;
                } else if (size == target) {
                    outcome.status = found.status;
                    outcome.failing_type = type;
                    return outcome;
                } else {
                    size = std::max(target, size / 2);
                }
            }
        }
    }

    for (auto& c : candidates)
        c.resize(target);
    if (auto bad = type_conflict(candidates, k, coloring, &result.type_colors)) {
        outcome.status = RamseyStatus::NotFound;
        outcome.failing_type = *bad;
        return outcome;
    }
    result.xi = std::move(candidates);
    outcome.status = RamseyStatus::Found;
    outcome.extraction = std::move(result);
    return outcome;
}

bool verify_multi_type(const std::vector<std::vector<Element>>& parts, std::size_t k,
                       const SubsetColoring& coloring, const MultiTypeExtraction& extraction,
                       std::size_t target)
{
    if (extraction.xi.size() != parts.size())
        return false;
    std::vector<Element> universe;
    std::vector<std::size_t> owner;
    for (std::size_t z = 0; z < parts.size(); ++z) {
        const auto& xi = extraction.xi[z];
        std::set<Element> unique(xi.begin(), xi.end());
        if (unique.size() != xi.size() || xi.size() != target)
            return false;
        for (Element e : xi) {
            if (std::find(parts[z].begin(), parts[z].end(), e) == parts[z].end())
                return false;
            universe.push_back(e);
            owner.push_back(z);
        }
    }
    // Sort by element so subsets are presented ascending.
    std::vector<std::size_t> idx(universe.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return universe[a] < universe[b]; });

    std::map<TypeVector, Color> colors;
    return for_each_mask(universe.size(), k, [&](std::uint64_t mask) {
        std::vector<Element> subset;
        TypeVector type(parts.size(), 0);
        for (std::size_t pos = 0; pos < idx.size(); ++pos)
            if (mask >> pos & 1) {
                subset.push_back(universe[idx[pos]]);
                ++type[owner[idx[pos]]];
            }
        const Color c = coloring(subset);
        auto [it, fresh] = colors.emplace(type, c);
        return fresh || it->second == c;
    });
}

} // namespace krepair
