#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pandora/instance.hpp"

namespace pandora {

enum class ActionKind { Quit, TakeUnopened, Open };

/// Decision at a DP state. `box` is 0-based and unused for Quit.
struct Action {
    ActionKind kind = ActionKind::Quit;
    std::size_t box = 0;

    bool operator==(const Action&) const = default;
};

struct DpEntry {
    BoxSet unopened;
    Scalar best;
    Scalar value;
    Action action;
};

/// Optimal value-to-go over (unopened set, best revealed value). Only states
/// reachable from (all boxes, 0) are stored: best is 0 or a support value of
/// an already opened box.
class ValueTable {
public:
    ValueTable() = default;
    ValueTable(std::size_t boxes, std::vector<Scalar> levels);

    std::size_t box_count() const { return boxes_; }
    /// Sorted candidate values of `best`: 0 and every support value.
    const std::vector<Scalar>& levels() const { return levels_; }

    bool has(BoxSet unopened, const Scalar& best) const;
    /// Throws DomainError for a state that is not stored.
    const Scalar& value(BoxSet unopened, const Scalar& best) const;
    Action action(BoxSet unopened, const Scalar& best) const;

    /// Stored states ordered by (unopened mask, best).
    std::vector<DpEntry> entries() const;

    // Raw slot access for the solver.
    std::size_t level_of(const Scalar& x) const;
    std::size_t slot(BoxSet unopened, std::size_t level) const { return unopened * levels_.size() + level; }
    void set(std::size_t slot, Scalar value, Action action);
    bool stored(std::size_t slot) const { return stored_[slot] != 0; }
    const Scalar& at(std::size_t slot) const { return values_[slot]; }

private:
    std::size_t boxes_ = 0;
    std::vector<Scalar> levels_;
    std::vector<Scalar> values_;
    std::vector<Action> actions_;
    std::vector<char> stored_;
};

struct DpResult {
    Scalar value;
    ValueTable table;
};

inline constexpr std::size_t kDefaultDpLimit = 14;
inline constexpr std::size_t kDefaultStructuredLimit = 6;

/// Bellman recursion for PNOI. Ties: quit, then take-unopened, then open,
/// lowest box first within each kind. Throws SizeError when n > limit.
DpResult optimal_value(const PnoiInstance& inst, std::size_t limit = kDefaultDpLimit);

/// Same recursion without the take-unopened branch (classic Pandora's box).
DpResult classic_optimal_solution(const PnoiInstance& inst, std::size_t limit = kDefaultDpLimit);
Scalar classic_optimal_value(const PnoiInstance& inst, std::size_t limit = kDefaultDpLimit);

/// Committed ordering with thresholds. Boxes are 0-based. thresholds[k]
/// belongs to sigma[k] and exists for every committed box but the last;
/// nullopt means the box never triggers a switch.
struct StructuredPolicy {
    std::vector<std::size_t> sigma;
    std::vector<std::optional<Scalar>> thresholds;

    bool operator==(const StructuredPolicy&) const = default;
};

/// Throws DomainError on duplicate or out-of-range boxes or a wrong number
/// of thresholds.
void validate_policy(const StructuredPolicy& pol, std::size_t n);

/// Exact expected payoff. Opens sigma in order; a value >= the box's
/// threshold switches to the index policy over every unopened box with the
/// best value so far as outside option. Reaching the last committed box
/// takes it unopened. Empty sigma is the index policy.
Scalar evaluate_structured_policy(const PnoiInstance& inst, const StructuredPolicy& pol);

struct StructuredSearch {
    StructuredPolicy policy;
    Scalar value;
};

/// Exhaustive search over ordered subsets and thresholds drawn from the
/// support of each committed box plus "never". The first maximum found in
/// the enumeration order wins (empty sigma first, then lexicographic sigma).
StructuredSearch best_structured_policy(const PnoiInstance& inst, std::size_t limit = kDefaultStructuredLimit);

}  // namespace pandora
