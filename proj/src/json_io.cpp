#include "pandora/json_io.hpp"

#include <fstream>
#include <sstream>

#include "pandora/error.hpp"

namespace pandora {

namespace {

Scalar scalar_field(const Json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_scalar(j.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Scalar(j.get<long>());
    throw ParseError(where + ": expected a rational string");
}

}  // namespace

PnoiInstance instance_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array()) {
        throw ParseError("instance: expected an object with a \"boxes\" array");
    }
    PnoiInstance inst;
    std::size_t idx = 0;
    for (const auto& b : j["boxes"]) {
        const std::string where = "box " + std::to_string(++idx);
        if (!b.is_object()) throw ParseError(where + ": expected an object");
        if (!b.contains("cost")) throw ParseError(where + ": missing \"cost\"");
        if (!b.contains("support") || !b["support"].is_array()) throw ParseError(where + ": missing \"support\" array");
        PnoiBox box;
        box.cost = scalar_field(b["cost"], where + " cost");
        for (const auto& pair : b["support"]) {
            if (!pair.is_array() || pair.size() != 2) throw ParseError(where + ": support entries are [value, probability]");
            box.dist.atoms.push_back({scalar_field(pair[0], where + " value"), scalar_field(pair[1], where + " probability")});
        }
        inst.boxes.push_back(std::move(box));
    }
    return inst;
}

Json instance_to_json(const PnoiInstance& inst) {
    Json boxes = Json::array();
    for (const auto& b : inst.boxes) {
        Json support = Json::array();
        for (const auto& a : b.dist.atoms) support.push_back({to_string(a.value), to_string(a.prob)});
        boxes.push_back({{"cost", to_string(b.cost)}, {"support", std::move(support)}});
    }
    return {{"boxes", std::move(boxes)}};
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

PnoiInstance load_instance(const std::filesystem::path& path) {
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": malformed JSON: " + e.what());
    }
    return instance_from_json(j);
}

std::string action_to_string(const Action& a, const char* quit_name) {
    switch (a.kind) {
        case ActionKind::Quit:
            return quit_name;
        case ActionKind::TakeUnopened:
            return "take-unopened:" + std::to_string(a.box + 1);
        case ActionKind::Open:
            return "open:" + std::to_string(a.box + 1);
    }
    return quit_name;
}

Json box_set_to_json(BoxSet s, std::size_t n) {
    Json out = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (contains(s, i)) out.push_back(i + 1);
    }
    return out;
}

Json value_table_to_json(const ValueTable& table) {
    Json out = Json::array();
    for (const auto& e : table.entries()) {
        out.push_back({{"unopened", box_set_to_json(e.unopened, table.box_count())},
                       {"best", to_string(e.best)},
                       {"value", to_string(e.value)},
                       {"action", action_to_string(e.action)}});
    }
    return out;
}

Json structured_policy_to_json(const StructuredPolicy& pol) {
    Json sigma = Json::array();
    for (auto i : pol.sigma) sigma.push_back(i + 1);
    Json th = Json::array();
    for (const auto& t : pol.thresholds) th.push_back(t ? to_string(*t) : std::string("never"));
    return {{"sigma", std::move(sigma)}, {"thresholds", std::move(th)}};
}

StructuredPolicy structured_policy_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("sigma") || !j["sigma"].is_array()) {
        throw ParseError("policy: expected an object with a \"sigma\" array");
    }
    StructuredPolicy pol;
    for (const auto& x : j["sigma"]) {
        if (!x.is_number_integer() || x.get<long>() < 1) throw ParseError("policy: sigma entries are 1-based box numbers");
        pol.sigma.push_back(static_cast<std::size_t>(x.get<long>() - 1));
    }
    if (j.contains("thresholds")) {
        if (!j["thresholds"].is_array()) throw ParseError("policy: \"thresholds\" must be an array");
        for (const auto& t : j["thresholds"]) {
            if (t.is_string() && t.get<std::string>() == "never") {
                pol.thresholds.emplace_back(std::nullopt);
            } else {
                pol.thresholds.emplace_back(scalar_field(t, "policy threshold"));
            }
        }
    }
    return pol;
}

Json ssdp_policy_to_json(const SsdpPolicy& pol) {
    Json out = Json::array();
    for (const auto& e : pol.entries()) {
        out.push_back({{"unopened", box_set_to_json(e.unopened, pol.box_count())},
                       {"state", to_string(e.state)},
                       {"action", action_to_string(e.action, "end")}});
    }
    return out;
}

Json trace_to_json(const PolicyTrace& trace) {
    Json steps = Json::array();
    for (const auto& s : trace.steps) {
        std::string name;
        switch (s.kind) {
            case StepKind::Open:
                name = "open:";
                break;
            case StepKind::Take:
                name = "take:";
                break;
            case StepKind::TakeUnopened:
                name = "take-unopened:";
                break;
        }
        Json step{{"action", name + std::to_string(s.box + 1)}};
        if (s.revealed) step["value"] = to_string(*s.revealed);
        step["cost"] = to_string(s.running_cost);
        steps.push_back(std::move(step));
    }
    return {{"steps", std::move(steps)}, {"payoff", to_string(trace.payoff)}};
}

}  // namespace pandora
