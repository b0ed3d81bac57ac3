#include "pandora/instance.hpp"

#include <algorithm>

#include "pandora/error.hpp"

namespace pandora {

DiscreteDistribution DiscreteDistribution::canonical(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (auto& a : atoms) {
        if (!merged.empty() && merged.back().value == a.value) {
            merged.back().prob += a.prob;
        } else {
            merged.push_back(std::move(a));
        }
    }
    return DiscreteDistribution{std::move(merged)};
}

DiscreteDistribution DiscreteDistribution::point(const Scalar& value) {
    return DiscreteDistribution{{Atom{value, Scalar(1)}}};
}

std::vector<Violation> validate_distribution(const DiscreteDistribution& dist, int box) {
    std::vector<Violation> out;
    if (dist.atoms.empty()) {
        out.push_back({box, "empty support"});
        return out;
    }
    Scalar total = 0;
    for (std::size_t k = 0; k < dist.atoms.size(); ++k) {
        const auto& a = dist.atoms[k];
        if (a.value < 0) out.push_back({box, "value < 0 (" + to_string(a.value) + ")"});
        if (a.prob <= 0) out.push_back({box, "probability <= 0 at value " + to_string(a.value)});
        if (k > 0 && !(dist.atoms[k - 1].value < a.value)) {
            out.push_back({box, "support values not strictly increasing"});
        }
        total += a.prob;
    }
    if (total != 1) out.push_back({box, "probabilities sum != 1 (got " + to_string(total) + ")"});
    return out;
}

std::vector<Violation> validate_instance(const PnoiInstance& inst) {
    std::vector<Violation> out;
    if (inst.boxes.empty()) out.push_back({0, "instance has no boxes"});
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (inst[i].cost < 0) out.push_back({id, "cost < 0"});
        auto dv = validate_distribution(inst[i].dist, id);
        out.insert(out.end(), dv.begin(), dv.end());
    }
    return out;
}

void require_valid(const PnoiInstance& inst) {
    auto v = validate_instance(inst);
    if (v.empty()) return;
    std::string msg = "invalid instance:";
    for (const auto& x : v) {
        msg += x.box > 0 ? " [box " + std::to_string(x.box) + "] " : " ";
        msg += x.reason + ";";
    }
    throw InvalidInstance(msg);
}

Scalar expected_value(const DiscreteDistribution& dist) {
    Scalar e = 0;
    for (const auto& a : dist.atoms) e += a.value * a.prob;
    return e;
}

Scalar max_support_value(const PnoiInstance& inst) {
    Scalar m = 0;
    for (const auto& b : inst.boxes) {
        if (!b.dist.atoms.empty()) m = max(m, b.dist.max_value());
    }
    return m;
}

}  // namespace pandora
