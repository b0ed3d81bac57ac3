#include "pandora/lclrs3.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "pandora/error.hpp"
#include "pandora/index.hpp"
#include "pandora/parallel.hpp"

namespace pandora {

namespace {

const Scalar kHalf(1, 2);

Scalar mass_at(const DiscreteDistribution& d, const Scalar& v) {
    for (const auto& a : d.atoms) {
        if (a.value == v) return a.prob;
    }
    return 0;
}

}  // namespace

std::vector<Violation> lclrs3_violations(const PnoiInstance& inst) {
    auto out = validate_instance(inst);
    if (!out.empty()) return out;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const int box = static_cast<int>(i + 1);
        const auto& b = inst[i];
        bool on_grid = std::all_of(b.dist.atoms.begin(), b.dist.atoms.end(),
                                   [](const Atom& a) { return a.value == 0 || a.value == kHalf || a.value == 1; });
        if (!on_grid) out.push_back({box, "support not within {0, 1/2, 1}"});
        if (mass_at(b.dist, Scalar(1)) == 0) out.push_back({box, "no mass at 1"});
        if (b.cost <= 0) out.push_back({box, "cost must be positive"});
        if (expected_value(b.dist) >= kHalf) out.push_back({box, "expected value not below 1/2"});
        if (compute_index(b) < kHalf) out.push_back({box, "index below 1/2"});
    }
    return out;
}

bool is_lclrs3(const PnoiInstance& inst) { return lclrs3_violations(inst).empty(); }

Lclrs3Instance as_lclrs3(const PnoiInstance& inst) {
    auto v = lclrs3_violations(inst);
    if (!v.empty()) {
        std::string msg = "not an LCLRS3 instance:";
        for (const auto& x : v) msg += " box " + std::to_string(x.box) + ": " + x.reason + ";";
        throw InvalidInstance(msg);
    }
    Lclrs3Instance out{inst, {}};
    for (const auto& b : inst.boxes) {
        out.boxes.push_back({mass_at(b.dist, Scalar(1)), mass_at(b.dist, kHalf), mass_at(b.dist, Scalar(0)), b.cost,
                             compute_index(b)});
    }
    return out;
}

void require_permutation(const std::vector<std::size_t>& sigma, std::size_t n) {
    if (sigma.size() != n) throw DomainError("ordering must list all " + std::to_string(n) + " boxes");
    std::vector<char> seen(n, 0);
    for (auto i : sigma) {
        if (i >= n || seen[i]) throw DomainError("ordering is not a permutation");
        seen[i] = 1;
    }
}

BoxSet later_higher(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma, std::size_t pos) {
    BoxSet T = 0;
    const Scalar& tau = inst.boxes[sigma[pos]].tau;
    for (std::size_t k = pos + 1; k < sigma.size(); ++k) {
        if (inst.boxes[sigma[k]].tau > tau) T |= BoxSet{1} << sigma[k];
    }
    return T;
}

namespace {

// Memoizes the two set functions every permutation evaluation needs.
class NormalEvaluator {
public:
    explicit NormalEvaluator(const Lclrs3Instance& inst)
        : inst_(inst), kappas_(kappa_distributions(inst.base)), handover_(std::size_t{1} << inst.size()) {}

    // E[max(1/2, max_{j in rest} kappa_j)]
    const Scalar& handover(BoxSet rest) {
        auto& slot = handover_[rest];
        if (!slot) slot = expected_max_with(kappas_, rest, kHalf);
        return *slot;
    }

    const Scalar& g(std::size_t i, BoxSet T) {
        auto key = std::make_pair(i, T);
        auto it = g_.find(key);
        if (it == g_.end()) {
            const Scalar& tau = inst_.boxes[i].tau;
            it = g_.emplace(key, expected_max_with(kappas_, T, tau) - tau).first;
        }
        return it->second;
    }

    Scalar normal(const std::vector<std::size_t>& sigma) {
        const std::size_t n = sigma.size();
        BoxSet rest = full_set(n);
        Scalar value = 0;
        Scalar zeros = 1;  // probability that every box so far showed 0
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const auto& b = inst_.boxes[sigma[k]];
            rest &= ~(BoxSet{1} << sigma[k]);
            value += zeros * (b.p - b.c + b.q * handover(rest));
            zeros *= b.r;
        }
        const auto& last = inst_.boxes[sigma.back()];
        return value + zeros * (last.p + last.q / 2);
    }

    Scalar loss(const std::vector<std::size_t>& sigma) {
        Scalar total = 0;
        Scalar prefix = 1;
        for (std::size_t k = 0; k < sigma.size(); ++k) {
            const std::size_t i = sigma[k];
            total += inst_.boxes[i].p * g(i, later_higher(inst_, sigma, k)) * prefix;
            prefix *= inst_.boxes[i].r;
        }
        return total;
    }

private:
    const Lclrs3Instance& inst_;
    std::vector<DiscreteDistribution> kappas_;
    std::vector<std::optional<Scalar>> handover_;
    std::map<std::pair<std::size_t, BoxSet>, Scalar> g_;
};

}  // namespace

Scalar g_value(const Lclrs3Instance& inst, std::size_t i, BoxSet T) {
    if (i >= inst.size()) throw DomainError("g: box out of range");
    if (contains(T, i)) throw DomainError("g: box " + std::to_string(i + 1) + " is in T");
    if (T > full_set(inst.size())) throw DomainError("g: T refers to unknown boxes");
    auto kappas = kappa_distributions(inst.base);
    const Scalar& tau = inst.boxes[i].tau;
    return expected_max_with(kappas, T, tau) - tau;
}

Scalar evaluate_normal_policy(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma) {
    require_permutation(sigma, inst.size());
    return NormalEvaluator(inst).normal(sigma);
}

Scalar loss(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma) {
    require_permutation(sigma, inst.size());
    return NormalEvaluator(inst).loss(sigma);
}

Scalar utility(const Lclrs3Instance& inst, const std::vector<std::size_t>& sigma) {
    require_permutation(sigma, inst.size());
    Scalar saved = inst.boxes[sigma.back()].c;
    for (std::size_t k = 0; k + 1 < sigma.size(); ++k) saved *= inst.boxes[sigma[k]].r;
    return saved - NormalEvaluator(inst).loss(sigma);
}

PermutationSearch best_permutation(const Lclrs3Instance& inst, std::size_t limit) {
    const std::size_t n = inst.size();
    if (n == 0) throw DomainError("best_permutation: empty instance");
    if (n > limit) {
        throw SizeError("permutation search is limited to " + std::to_string(limit) + " boxes, got " +
                        std::to_string(n));
    }
    std::vector<PermutationSearch> branch(n);
    parallel_for(n, [&](std::size_t first) {
        NormalEvaluator eval(inst);
        std::vector<std::size_t> sigma{first};
        for (std::size_t i = 0; i < n; ++i) {
            if (i != first) sigma.push_back(i);
        }
        bool found = false;
        do {
            Scalar v = eval.normal(sigma);
            if (!found || v > branch[first].value) {
                found = true;
                branch[first] = {sigma, std::move(v)};
            }
        } while (std::next_permutation(sigma.begin() + 1, sigma.end()));
    });
    PermutationSearch best = std::move(branch[0]);
    for (std::size_t f = 1; f < n; ++f) {
        if (branch[f].value > best.value) best = std::move(branch[f]);
    }
    return best;
}

CertifiedValue certified_exp_half(const Scalar& y, const Scalar& err) {
    if (err <= 0) throw DomainError("rational_exp_half: err must be positive");
    if (y < 0 || y > 1) throw DomainError("rational_exp_half: y must lie in [0, 1]");
    if (y == 0) return {Scalar(2), Scalar(0)};

    // 2 e^a with a = y/2 <= 1/2. Truncating after a^K/K! leaves at most
    // e^a a^{K+1}/(K+1)! < 2 a^{K+1}/(K+1)!, doubled for the factor 2.
    const Scalar a = y / 2;
    Scalar sum = 1;
    Scalar term = 1;
    Scalar tail;
    for (long k = 1;; ++k) {
        term = term * a / k;  // a^k / k!
        tail = 4 * term * a / (k + 1);
        sum += term;
        if (tail <= err / 2) break;
    }
    Scalar t = 2 * sum;

    // Round down to a dyadic grid fine enough to cost at most err/4.
    long bits = 0;
    while (pow2(-bits) > err / 4) ++bits;
    Scalar rounded = floor_to_grid(t, pow2(-bits));
    return {rounded, tail + (t - rounded)};
}

Scalar rational_exp_half(const Scalar& y, const Scalar& err) { return certified_exp_half(y, err).value; }

ReductionOutput reduce_partition(const std::vector<long long>& S) {
    const std::size_t n = S.size();
    if (n == 0) throw DomainError("partition input is empty");
    if (n > 62) throw DomainError("partition input is too long");
    const long long cap = 1LL << n;
    for (auto s : S) {
        if (s < 1 || s > cap) {
            throw DomainError("partition value " + std::to_string(s) + " outside [1, " + std::to_string(cap) + "]");
        }
    }

    ReductionOutput red;
    red.source = S;
    red.gamma = pow2(8 * static_cast<long>(n));
    red.delta = pow2(-7 * static_cast<long>(n));
    const Scalar& G = red.gamma;

    red.y = 0;
    for (auto s : S) {
        Scalar ps = Scalar(static_cast<long>(s)) / G;
        red.y += ps + ps * ps;
    }
    auto cert = certified_exp_half(red.y, red.delta * red.delta / 4);
    red.t = cert.value;
    red.t_error_bound = cert.bound;
    const Scalar& t = red.t;
    red.tau_L = kHalf;
    red.tau_H = (-3 * t * G + 28 + 94 * t) / (-4 * t * G + 56 + 104 * t);

    const Scalar p_low = 1 / G;
    const Scalar q_low = 1 - 41 / G;
    const Scalar p_top(1, 8);
    const Scalar spread = red.tau_H - red.tau_L;

    auto make_box = [](const Scalar& p, const Scalar& q, const Scalar& c) {
        std::vector<Atom> atoms;
        Scalar r = 1 - p - q;
        if (r > 0) atoms.push_back({Scalar(0), r});
        if (q > 0) atoms.push_back({kHalf, q});
        atoms.push_back({Scalar(1), p});
        return PnoiBox{c, DiscreteDistribution{std::move(atoms)}};
    };

    PnoiInstance inst;
    for (auto s : S) {
        Scalar p = Scalar(static_cast<long>(s)) / G;
        Scalar tau = red.tau_H + p * p_low * (1 - p_top) * spread / (2 * p_top);
        inst.boxes.push_back(make_box(p, p, p * (1 - tau)));
    }
    inst.boxes.push_back(make_box(p_low, q_low, p_low / 2));
    inst.boxes.push_back(make_box(p_top, p_top, Scalar(1, 32)));

    auto violations = lclrs3_violations(inst);
    if (!violations.empty()) {
        throw ConstructionError("reduction produced a box outside the class: box " +
                                std::to_string(violations.front().box) + ": " + violations.front().reason);
    }
    red.instance = as_lclrs3(inst);
    auto problems = check_reduction(red);
    if (!problems.empty()) throw ConstructionError("reduction invariant failed: " + problems.front());
    return red;
}

std::vector<std::string> check_reduction(const ReductionOutput& red) {
    std::vector<std::string> out;
    const std::size_t n = red.n();
    const auto& inst = red.instance;
    if (inst.size() != n + 2) {
        out.push_back("instance must have n + 2 boxes");
        return out;
    }
    if (!is_lclrs3(inst.base)) out.push_back("instance is not LCLRS3");
    if (red.tau_L != kHalf) out.push_back("tau_L != 1/2");
    if (inst.boxes[n].tau != red.tau_L) out.push_back("box n+1 index != tau_L");
    if (inst.boxes[n + 1].tau != Scalar(3, 4)) out.push_back("box n+2 index != 3/4");
    if (!(red.tau_H > red.tau_L && red.tau_H < Scalar(3, 4))) out.push_back("tau_H outside (1/2, 3/4)");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = inst.boxes[i];
        if (!(inst.boxes[n + 1].tau > b.tau && b.tau > red.tau_H)) {
            out.push_back("index order violated at box " + std::to_string(i + 1));
        }
        if (b.c != b.p * (1 - b.tau)) out.push_back("cost/index mismatch at box " + std::to_string(i + 1));
    }
    const Scalar limit = red.delta * red.delta / 4;
    if (red.t_error_bound > limit) out.push_back("certified bound on t exceeds Delta^2/4");
    // Independent enclosure of 2 e^{y/2}.
    Interval e = exp_interval(red.y / 2, limit / 16);
    Interval two_e{2 * e.lo, 2 * e.hi};
    if (abs(red.t - two_e.lo) > limit || abs(red.t - two_e.hi) > limit) out.push_back("t is not within Delta^2/4 of 2e^{y/2}");
    return out;
}

PartitionVerdict partition_answer(const ReductionOutput& red, std::size_t max_n) {
    const std::size_t n = red.n();
    if (n > max_n) {
        throw SizeError("partition answer needs exhaustive search over " + std::to_string(n + 2) +
                        "! orderings; limited to n <= " + std::to_string(max_n));
    }
    auto best = best_permutation(red.instance);
    PartitionVerdict v{false, best.sigma, 0, 0};
    const auto pos = std::find(best.sigma.begin(), best.sigma.end(), n) - best.sigma.begin();
    Scalar before = 0, after = 0;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(best.sigma.size()); ++k) {
        const std::size_t i = best.sigma[k];
        if (i >= n) continue;
        if (k < pos) {
            v.before |= BoxSet{1} << i;
            before += red.instance.boxes[i].p;
        } else {
            v.after |= BoxSet{1} << i;
            after += red.instance.boxes[i].p;
        }
    }
    v.yes = before == after;
    return v;
}

ReductionConstants reduction_constants(const ReductionOutput& red) {
    const std::size_t n = red.n();
    const auto& low = red.instance.boxes[n];
    const auto& top = red.instance.boxes[n + 1];
    const Scalar& tH = red.tau_H;
    const Scalar& tL = red.tau_L;
    ReductionConstants k;
    k.k1 = -top.p * (top.tau - tH) * (low.p + low.q) / 2 +
           low.p * ((1 - top.p) * (tH - tL) + top.p * (top.tau - tL));
    k.k2 = low.p * (1 - top.p) * (tH - tL);
    Scalar prod_r = 1;
    Scalar sum_sq = 0;
    for (std::size_t i = 0; i <= n; ++i) prod_r *= red.instance.boxes[i].r;
    for (std::size_t i = 0; i < n; ++i) sum_sq += red.instance.boxes[i].p * red.instance.boxes[i].p;
    k.C = top.p * (top.tau - tH) * (1 - prod_r) / 2 + k.k2 * sum_sq / 2;
    return k;
}

Interval h_interval(const Scalar& ratio, const Scalar& y, const Scalar& x, const Scalar& width) {
    for (Scalar w = width / 8;; w /= 16) {
        Interval a = exp_interval(-2 * x, w);
        Interval b = exp_interval(x - y, w);
        Interval h = a * (Scalar(1) - ratio * b);
        if (h.width() <= width) return h;
    }
}

Interval h_second_derivative(const Scalar& ratio, const Scalar& y, const Scalar& x, const Scalar& width) {
    for (Scalar w = width / 8;; w /= 16) {
        Interval a = exp_interval(-2 * x, w);
        Interval b = exp_interval(-x - y, w);
        Interval d = Scalar(4) * a - ratio * b;
        if (d.width() <= width) return d;
    }
}

ReductionDiagnostics h_diagnostics(const ReductionOutput& red, const std::vector<std::size_t>& sigma,
                                   const Scalar& width) {
    const std::size_t n = red.n();
    require_permutation(sigma, n + 2);
    auto k = reduction_constants(red);
    ReductionDiagnostics d;
    d.k1 = k.k1;
    d.k2 = k.k2;
    d.C = k.C;
    d.y = red.y;
    d.x = 0;
    d.z = 0;
    const auto pos = std::find(sigma.begin(), sigma.end(), n) - sigma.begin();
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(sigma.size()); ++j) {
        const std::size_t i = sigma[j];
        if (i >= n) continue;
        const Scalar& p = red.instance.boxes[i].p;
        if (j < pos) {
            d.x += p + p * p;
        } else {
            d.z += p * p / 2;
        }
    }
    d.loss = loss(red.instance, sigma);
    d.scaled_loss = (d.loss - d.C) / d.k1;
    d.h = h_interval(d.k2 / d.k1, d.y, d.x, width);
    d.residual = max(abs(d.scaled_loss - d.h.lo), abs(d.scaled_loss - d.h.hi));
    Scalar sum_sq = 0;
    for (std::size_t i = 0; i < n; ++i) sum_sq += red.instance.boxes[i].p * red.instance.boxes[i].p;
    d.corrected_C = d.C - d.k2 * sum_sq;
    const Scalar centered = (d.loss - d.corrected_C) / d.k1;
    d.corrected_residual = max(abs(centered - d.h.lo), abs(centered - d.h.hi));
    return d;
}

Scalar scheduling_sum(const std::vector<Scalar>& p, const std::vector<Scalar>& r) {
    if (p.size() != r.size()) throw DomainError("scheduling_sum: length mismatch");
    Scalar total = 0;
    Scalar prefix = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        total += p[i] * prefix;
        prefix *= r[i];
    }
    return total;
}

}  // namespace pandora
