#include "pandora/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pandora/error.hpp"
#include "pandora/index.hpp"
#include "pandora/parallel.hpp"
#include "pandora/rng.hpp"

namespace pandora {

ValueSampler::ValueSampler(const PnoiInstance& inst) {
    const Scalar scale = pow2(53);
    for (const auto& b : inst.boxes) {
        std::vector<std::uint64_t> bounds;
        Scalar cum = 0;
        for (const auto& a : b.dist.atoms) {
            cum += a.prob;
            Scalar x = cum * scale;
            mpz_class c;
            mpz_cdiv_q(c.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
            bounds.push_back(c.get_ui());
        }
        bounds_.push_back(std::move(bounds));
    }
}

std::size_t ValueSampler::sample(std::uint64_t seed, std::uint64_t trial, std::size_t box) const {
    const std::uint64_t u = box_draw(seed, trial, box);
    const auto& b = bounds_[box];
    auto it = std::upper_bound(b.begin(), b.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - b.begin(), static_cast<std::ptrdiff_t>(b.size()) - 1));
}

PolicyTrace index_policy_trial(const PnoiInstance& inst, const std::vector<Scalar>& indices,
                               const ValueSampler& sampler, std::uint64_t seed, std::uint64_t trial) {
    const std::size_t n = inst.size();
    PolicyTrace trace;
    Scalar paid = 0;
    std::optional<std::size_t> held;  // opened box with the best value
    Scalar best = 0;
    std::vector<char> opened(n, 0);
    for (;;) {
        std::optional<std::size_t> next;
        for (std::size_t i = 0; i < n; ++i) {
            if (!opened[i] && (!next || indices[i] > indices[*next])) next = i;
        }
        if (!next || indices[*next] <= 0 || (held && indices[*next] <= best)) break;
        const std::size_t i = *next;
        opened[i] = 1;
        paid += inst[i].cost;
        const Scalar& v = inst[i].dist.atoms[sampler.sample(seed, trial, i)].value;
        trace.steps.push_back({StepKind::Open, i, v, paid});
        if (!held || v > best) {
            held = i;
            best = v;
        }
    }
    if (held) {
        trace.steps.push_back({StepKind::Take, *held, std::nullopt, paid});
        trace.payoff = best - paid;
    } else {
        trace.payoff = 0;
    }
    return trace;
}

std::vector<PolicyTrace> run_index_policy(const PnoiInstance& inst, const SimulationConfig& cfg) {
    require_valid(inst);
    const auto indices = compute_indices(inst);
    const ValueSampler sampler(inst);
    std::vector<PolicyTrace> out(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t t) { out[t] = index_policy_trial(inst, indices, sampler, cfg.seed, t); });
    return out;
}

namespace {

SimulationSummary finish_summary(const std::string& policy, const SimulationConfig& cfg, const Scalar& sum,
                                 const Scalar& sum_sq) {
    SimulationSummary s{policy, cfg.trials, cfg.seed, Scalar(0), 0.0};
    if (cfg.trials == 0) return s;
    const Scalar n(static_cast<unsigned long>(cfg.trials));
    s.mean = sum / n;
    if (cfg.trials > 1) {
        Scalar var = (sum_sq - n * s.mean * s.mean) / (n - 1);
        s.std_error = std::sqrt(to_double(var) / to_double(n));
    }
    return s;
}

}  // namespace

SimulationSummary summarize(const std::vector<PolicyTrace>& traces, const SimulationConfig& cfg,
                            const std::string& policy) {
    Scalar sum = 0;
    Scalar sum_sq = 0;
    for (const auto& t : traces) {
        sum += t.payoff;
        sum_sq += t.payoff * t.payoff;
    }
    SimulationConfig c = cfg;
    c.trials = traces.size();
    return finish_summary(policy, c, sum, sum_sq);
}

SimulationSummary index_policy_summary(const PnoiInstance& inst, const SimulationConfig& cfg) {
    require_valid(inst);
    const auto indices = compute_indices(inst);
    const ValueSampler sampler(inst);
    // Fixed chunking keeps the exact sums independent of the thread count.
    constexpr std::uint64_t kChunk = 4096;
    const std::size_t chunks = static_cast<std::size_t>((cfg.trials + kChunk - 1) / kChunk);
    std::vector<Scalar> sums(chunks), squares(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        const std::uint64_t end = std::min<std::uint64_t>(cfg.trials, (c + 1) * kChunk);
        for (std::uint64_t t = c * kChunk; t < end; ++t) {
            Scalar p = index_policy_trial(inst, indices, sampler, cfg.seed, t).payoff;
            squares[c] += p * p;
            sums[c] += p;
        }
    });
    Scalar sum = 0, sum_sq = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        sum += sums[c];
        sum_sq += squares[c];
    }
    return finish_summary("index", cfg, sum, sum_sq);
}

std::string summary_csv_header() { return "policy,trials,seed,mean,stderr"; }

std::string summary_csv_row(const SimulationSummary& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", s.std_error);
    return s.policy + "," + std::to_string(s.trials) + "," + std::to_string(s.seed) + "," + to_string(s.mean) + "," +
           buf;
}

bool check_non_exposed(const std::vector<PolicyTrace>& traces, const PnoiInstance& inst) {
    const auto indices = compute_indices(inst);
    for (const auto& trace : traces) {
        std::optional<std::size_t> taken;
        for (const auto& step : trace.steps) {
            if (step.box >= inst.size()) throw DomainError("trace refers to box " + std::to_string(step.box + 1));
            if (step.kind != StepKind::Open) taken = step.box;
        }
        for (const auto& step : trace.steps) {
            if (step.kind != StepKind::Open) continue;
            if (!step.revealed) throw DomainError("trace: open step without a revealed value");
            const auto& atoms = inst[step.box].dist.atoms;
            bool in_support = std::any_of(atoms.begin(), atoms.end(), [&](const Atom& a) { return a.value == *step.revealed; });
            if (!in_support) {
                throw DomainError("trace: value " + to_string(*step.revealed) + " is not in the support of box " +
                                  std::to_string(step.box + 1));
            }
            if (*step.revealed > indices[step.box] && taken != step.box) return false;
        }
    }
    return true;
}

namespace {

bool is_01_supported(const PnoiInstance& inst) {
    for (const auto& b : inst.boxes) {
        for (const auto& a : b.dist.atoms) {
            if (a.value != 0 && a.value != 1) return false;
        }
    }
    return true;
}

Scalar prob_one(const PnoiBox& b) {
    return b.dist.max_value() == 1 ? b.dist.atoms.back().prob : Scalar(0);
}

}  // namespace

CommitPolicy make_commit_policy(const PnoiInstance& inst, std::size_t commit) {
    const auto indices = compute_indices(inst);
    const Scalar mean = expected_value(inst[commit].dist);
    CommitPolicy pol{commit, {}};
    for (std::size_t j = 0; j < inst.size(); ++j) {
        if (j != commit && indices[j] >= mean) pol.probe_order.push_back(j);
    }
    std::stable_sort(pol.probe_order.begin(), pol.probe_order.end(),
                     [&](std::size_t a, std::size_t b) { return indices[a] > indices[b]; });
    return pol;
}

Scalar evaluate_commit_policy(const PnoiInstance& inst, const CommitPolicy& pol) {
    Scalar value = 0;
    Scalar still_zero = 1;  // probability that every probe so far showed 0
    for (auto j : pol.probe_order) {
        const Scalar p = prob_one(inst[j]);
        value += still_zero * (p - inst[j].cost);
        still_zero *= 1 - p;
    }
    return value + still_zero * expected_value(inst[pol.commit].dist);
}

Support01Result support01_optimal(const PnoiInstance& inst) {
    require_valid(inst);
    if (!is_01_supported(inst)) throw DomainError("support01_optimal: every support must lie in {0, 1}");
    Support01Result best{std::nullopt, max_kappa_expectation(inst)};
    for (std::size_t i = 0; i < inst.size(); ++i) {
        CommitPolicy pol = make_commit_policy(inst, i);
        Scalar v = evaluate_commit_policy(inst, pol);
        if (v > best.value) best = {std::move(pol), std::move(v)};
    }
    return best;
}

Scalar half_approx(const PnoiInstance& inst) {
    Scalar best = max_kappa_expectation(inst);
    for (const auto& b : inst.boxes) best = max(best, expected_value(b.dist));
    return best;
}

}  // namespace pandora
