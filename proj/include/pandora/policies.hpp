#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pandora/instance.hpp"

namespace pandora {

enum class StepKind { Open, Take, TakeUnopened };

/// One action of a simulated run. `box` is 0-based; `revealed` is set for
/// Open steps; `running_cost` is the total paid after this step.
struct TraceStep {
    StepKind kind;
    std::size_t box;
    std::optional<Scalar> revealed;
    Scalar running_cost;

    bool operator==(const TraceStep&) const = default;
};

/// A run that ends without a take step quit with nothing.
struct PolicyTrace {
    std::vector<TraceStep> steps;
    Scalar payoff;

    bool operator==(const PolicyTrace&) const = default;
};

struct SimulationConfig {
    std::uint64_t seed = 0;
    std::uint64_t trials = 1;
};

/// Samples box values by inverse CDF from counter-based uniform draws:
/// atom k is chosen when the 53-bit draw u satisfies
/// cum_{k-1} <= u / 2^53 < cum_k.
class ValueSampler {
public:
    explicit ValueSampler(const PnoiInstance& inst);
    std::size_t sample(std::uint64_t seed, std::uint64_t trial, std::size_t box) const;  // atom position

private:
    std::vector<std::vector<std::uint64_t>> bounds_;
};

/// Index policy: while the largest unopened index is positive and exceeds
/// the best value seen, open that box (equal indices: lowest box first);
/// then take the best opened box (first opened among equals).
PolicyTrace index_policy_trial(const PnoiInstance& inst, const std::vector<Scalar>& indices,
                               const ValueSampler& sampler, std::uint64_t seed, std::uint64_t trial);

std::vector<PolicyTrace> run_index_policy(const PnoiInstance& inst, const SimulationConfig& cfg);

struct SimulationSummary {
    std::string policy;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Scalar mean;
    double std_error = 0;
};

SimulationSummary summarize(const std::vector<PolicyTrace>& traces, const SimulationConfig& cfg,
                            const std::string& policy = "index");

/// Summary of run_index_policy without keeping the traces.
SimulationSummary index_policy_summary(const PnoiInstance& inst, const SimulationConfig& cfg);

std::string summary_csv_header();
std::string summary_csv_row(const SimulationSummary& s);

/// True iff every opened box whose value exceeds its index is the box
/// finally taken. Throws DomainError when a trace does not fit the instance.
bool check_non_exposed(const std::vector<PolicyTrace>& traces, const PnoiInstance& inst);

/// Commit to box `commit`: probe the boxes in `probe_order` until one shows
/// 1, otherwise take `commit` unopened. Boxes are 0-based.
struct CommitPolicy {
    std::size_t commit;
    std::vector<std::size_t> probe_order;

    bool operator==(const CommitPolicy&) const = default;
};

/// Probe order for committing to box i: the other boxes with index at least
/// E[v_i], by decreasing index, ties by box.
CommitPolicy make_commit_policy(const PnoiInstance& inst, std::size_t commit);

/// Exact payoff of a commit policy on a {0,1}-supported instance.
Scalar evaluate_commit_policy(const PnoiInstance& inst, const CommitPolicy& pol);

struct Support01Result {
    std::optional<CommitPolicy> commit;  // nullopt: the index policy
    Scalar value;
};

/// Optimal policy for instances whose supports lie in {0, 1}: the best of the
/// index policy and the n commit policies (earlier candidate wins ties).
/// Throws DomainError for other supports.
Support01Result support01_optimal(const PnoiInstance& inst);

/// max(index policy payoff, max_i E[v_i]); between OPT/2 and OPT.
Scalar half_approx(const PnoiInstance& inst);

}  // namespace pandora
