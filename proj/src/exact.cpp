#include "pandora/exact.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "pandora/error.hpp"
#include "pandora/index.hpp"
#include "pandora/parallel.hpp"

namespace pandora {

ValueTable::ValueTable(std::size_t boxes, std::vector<Scalar> levels)
    : boxes_(boxes), levels_(std::move(levels)) {
    const std::size_t slots = (std::size_t{1} << boxes_) * levels_.size();
    values_.resize(slots);
    actions_.resize(slots);
    stored_.assign(slots, 0);
}

std::size_t ValueTable::level_of(const Scalar& x) const {
    auto it = std::lower_bound(levels_.begin(), levels_.end(), x);
    if (it == levels_.end() || *it != x) throw DomainError("value table: " + to_string(x) + " is not a state value");
    return static_cast<std::size_t>(it - levels_.begin());
}

bool ValueTable::has(BoxSet unopened, const Scalar& best) const {
    if (unopened > full_set(boxes_)) return false;
    auto it = std::lower_bound(levels_.begin(), levels_.end(), best);
    if (it == levels_.end() || *it != best) return false;
    return stored(slot(unopened, static_cast<std::size_t>(it - levels_.begin())));
}

const Scalar& ValueTable::value(BoxSet unopened, const Scalar& best) const {
    if (!has(unopened, best)) throw DomainError("value table: unreachable state");
    return values_[slot(unopened, level_of(best))];
}

Action ValueTable::action(BoxSet unopened, const Scalar& best) const {
    if (!has(unopened, best)) throw DomainError("value table: unreachable state");
    return actions_[slot(unopened, level_of(best))];
}

void ValueTable::set(std::size_t s, Scalar value, Action action) {
    values_[s] = std::move(value);
    actions_[s] = action;
    stored_[s] = 1;
}

std::vector<DpEntry> ValueTable::entries() const {
    std::vector<DpEntry> out;
    for (BoxSet mask = 0; mask <= full_set(boxes_); ++mask) {
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            std::size_t s = slot(mask, l);
            if (stored_[s]) out.push_back({mask, levels_[l], values_[s], actions_[s]});
        }
    }
    return out;
}

namespace {

DpResult solve(const PnoiInstance& inst, std::size_t limit, bool allow_take_unopened) {
    require_valid(inst);
    const std::size_t n = inst.size();
    if (n > limit) {
        throw SizeError("instance has " + std::to_string(n) + " boxes; the exact DP is limited to " +
                        std::to_string(limit));
    }

    std::vector<Scalar> levels{Scalar(0)};
    for (const auto& b : inst.boxes) {
        for (const auto& a : b.dist.atoms) levels.push_back(a.value);
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    ValueTable table(n, levels);
    std::vector<std::vector<std::size_t>> atom_level(n);
    std::vector<Scalar> means(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& a : inst[i].dist.atoms) atom_level[i].push_back(table.level_of(a.value));
        means[i] = expected_value(inst[i].dist);
    }

    std::vector<std::vector<BoxSet>> layers(n + 1);
    for (BoxSet mask = 0; mask <= full_set(n); ++mask) layers[std::popcount(mask)].push_back(mask);

    const BoxSet all = full_set(n);
    auto solve_mask = [&](BoxSet mask) {
        std::vector<char> reachable(levels.size(), 0);
        reachable[0] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (contains(mask, i)) continue;
            for (auto l : atom_level[i]) reachable[l] = 1;
        }
        for (std::size_t l = 0; l < levels.size(); ++l) {
            if (!reachable[l]) continue;
            Scalar best_value = levels[l];
            Action best_action{ActionKind::Quit, 0};
            if (allow_take_unopened) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (contains(mask, i) && means[i] > best_value) {
                        best_value = means[i];
                        best_action = {ActionKind::TakeUnopened, i};
                    }
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (!contains(mask, i)) continue;
                const BoxSet rest = mask & ~(BoxSet{1} << i);
                Scalar v = -inst[i].cost;
                const auto& atoms = inst[i].dist.atoms;
                for (std::size_t k = 0; k < atoms.size(); ++k) {
                    v += atoms[k].prob * table.at(table.slot(rest, std::max(l, atom_level[i][k])));
                }
                if (v > best_value) {
                    best_value = std::move(v);
                    best_action = {ActionKind::Open, i};
                }
            }
            table.set(table.slot(mask, l), std::move(best_value), best_action);
        }
    };
    for (const auto& layer : layers) {
        parallel_for(layer.size(), [&](std::size_t k) { solve_mask(layer[k]); });
    }

    Scalar root = table.at(table.slot(all, 0));
    return {std::move(root), std::move(table)};
}

}  // namespace

DpResult optimal_value(const PnoiInstance& inst, std::size_t limit) { return solve(inst, limit, true); }

DpResult classic_optimal_solution(const PnoiInstance& inst, std::size_t limit) { return solve(inst, limit, false); }

Scalar classic_optimal_value(const PnoiInstance& inst, std::size_t limit) {
    return classic_optimal_solution(inst, limit).value;
}

void validate_policy(const StructuredPolicy& pol, std::size_t n) {
    std::vector<char> seen(n, 0);
    for (auto i : pol.sigma) {
        if (i >= n) throw DomainError("structured policy: box " + std::to_string(i + 1) + " out of range");
        if (seen[i]) throw DomainError("structured policy: box " + std::to_string(i + 1) + " committed twice");
        seen[i] = 1;
    }
    const std::size_t want = pol.sigma.empty() ? 0 : pol.sigma.size() - 1;
    if (pol.thresholds.size() != want) {
        throw DomainError("structured policy: expected " + std::to_string(want) + " thresholds, got " +
                          std::to_string(pol.thresholds.size()));
    }
}

namespace {

// Shared machinery for evaluating and searching structured policies. The
// probability that the policy is still following sigma is tracked as a
// distribution over the best value seen so far.
class StructuredEvaluator {
public:
    explicit StructuredEvaluator(const PnoiInstance& inst) : inst_(inst), kappas_(kappa_distributions(inst)) {
        for (const auto& b : inst.boxes) means_.push_back(expected_value(b.dist));
    }

    using Continuing = std::map<Scalar, Scalar>;  // best so far -> probability

    // Index policy on `rest` with outside option b.
    const Scalar& switch_value(BoxSet rest, const Scalar& b) {
        auto key = std::make_pair(rest, b);
        auto it = memo_.find(key);
        if (it == memo_.end()) it = memo_.emplace(key, expected_max_with(kappas_, rest, b)).first;
        return it->second;
    }

    // Opens box i from the continuing distribution. Outcomes at or above the
    // threshold switch and add to `accrued`.
    Continuing open(const Continuing& cont, std::size_t i, const std::optional<Scalar>& threshold,
                    BoxSet rest_after, Scalar& accrued) {
        Continuing next;
        Scalar mass = 0;
        for (const auto& [b, m] : cont) mass += m;
        accrued -= mass * inst_[i].cost;
        for (const auto& [b, m] : cont) {
            for (const auto& a : inst_[i].dist.atoms) {
                const Scalar& nb = max(b, a.value);
                Scalar w = m * a.prob;
                if (threshold && a.value >= *threshold) {
                    accrued += w * switch_value(rest_after, nb);
                } else {
                    next[nb] += w;
                }
            }
        }
        return next;
    }

    static Scalar mass(const Continuing& cont) {
        Scalar m = 0;
        for (const auto& [b, p] : cont) m += p;
        return m;
    }

    const PnoiInstance& inst() const { return inst_; }
    const Scalar& mean(std::size_t i) const { return means_[i]; }

private:
    const PnoiInstance& inst_;
    std::vector<DiscreteDistribution> kappas_;
    std::vector<Scalar> means_;
    std::map<std::pair<BoxSet, Scalar>, Scalar> memo_;
};

class StructuredSearcher {
public:
    explicit StructuredSearcher(const PnoiInstance& inst) : eval_(inst) {}

    // Explores every policy whose sigma starts with `first`.
    StructuredSearch run(std::size_t first) {
        found_ = false;
        const std::size_t n = eval_.inst().size();
        StructuredEvaluator::Continuing root{{Scalar(0), Scalar(1)}};
        StructuredPolicy prefix;
        visit(prefix, full_set(n), root, Scalar(0), first);
        return {best_policy_, best_value_};
    }

    bool found() const { return found_; }

private:
    void offer(const StructuredPolicy& pol, const Scalar& value) {
        if (!found_ || value > best_value_) {
            found_ = true;
            best_value_ = value;
            best_policy_ = pol;
        }
    }

    // Chooses the next committed box (restricted to `only` at the root).
    void visit(StructuredPolicy& prefix, BoxSet unopened, const StructuredEvaluator::Continuing& cont,
               const Scalar& accrued, std::optional<std::size_t> only = std::nullopt) {
        const std::size_t n = eval_.inst().size();
        const Scalar cont_mass = StructuredEvaluator::mass(cont);
        for (std::size_t j = 0; j < n; ++j) {
            if (!contains(unopened, j) || (only && j != *only)) continue;

            // j as the last committed box, taken unopened.
            prefix.sigma.push_back(j);
            offer(prefix, accrued + cont_mass * eval_.mean(j));
            prefix.sigma.pop_back();

            // Nobody is still following sigma: every extension has the same
            // value, so only the shortest completion is kept.
            if (cont_mass == 0) return;
            if (std::popcount(unopened) < 2) continue;

            const BoxSet rest = unopened & ~(BoxSet{1} << j);
            std::vector<std::optional<Scalar>> choices;
            for (const auto& a : eval_.inst()[j].dist.atoms) choices.emplace_back(a.value);
            choices.emplace_back(std::nullopt);
            for (const auto& t : choices) {
                Scalar acc = accrued;
                auto next = eval_.open(cont, j, t, rest, acc);
                prefix.sigma.push_back(j);
                prefix.thresholds.push_back(t);
                visit(prefix, rest, next, acc);
                prefix.sigma.pop_back();
                prefix.thresholds.pop_back();
            }
        }
    }

    StructuredEvaluator eval_;
    bool found_ = false;
    StructuredPolicy best_policy_;
    Scalar best_value_;
};

}  // namespace

Scalar evaluate_structured_policy(const PnoiInstance& inst, const StructuredPolicy& pol) {
    require_valid(inst);
    validate_policy(pol, inst.size());
    if (pol.sigma.empty()) return max_kappa_expectation(inst);

    StructuredEvaluator eval(inst);
    StructuredEvaluator::Continuing cont{{Scalar(0), Scalar(1)}};
    Scalar accrued = 0;
    BoxSet unopened = full_set(inst.size());
    for (std::size_t k = 0; k + 1 < pol.sigma.size(); ++k) {
        const std::size_t i = pol.sigma[k];
        unopened &= ~(BoxSet{1} << i);
        cont = eval.open(cont, i, pol.thresholds[k], unopened, accrued);
    }
    return accrued + StructuredEvaluator::mass(cont) * eval.mean(pol.sigma.back());
}

StructuredSearch best_structured_policy(const PnoiInstance& inst, std::size_t limit) {
    require_valid(inst);
    const std::size_t n = inst.size();
    if (n > limit) {
        throw SizeError("instance has " + std::to_string(n) + " boxes; structured search is limited to " +
                        std::to_string(limit));
    }
    std::vector<StructuredSearch> branch(n);
    parallel_for(n, [&](std::size_t first) { branch[first] = StructuredSearcher(inst).run(first); });

    StructuredSearch best{StructuredPolicy{}, max_kappa_expectation(inst)};
    for (auto& b : branch) {
        if (b.value > best.value) best = std::move(b);
    }
    return best;
}

}  // namespace pandora
