#include "rlms_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "rlms_app/catalog.hpp"

namespace rlms::app {
namespace {

using Json = nlohmann::ordered_json;

std::string child(const std::string& path, std::string_view key)
{
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string element(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError("'" + path + "' " + what);
}

std::size_t as_size(const Json& v, const std::string& path)
{
    if (!v.is_number_unsigned()) {
        fail(path, "must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double as_number(const Json& v, const std::string& path)
{
    if (!v.is_number()) {
        fail(path, "must be a number");
    }
    return v.get<double>();
}

std::string as_string(const Json& v, const std::string& path)
{
    if (!v.is_string()) {
        fail(path, "must be a string");
    }
    return v.get<std::string>();
}

bool as_bool(const Json& v, const std::string& path)
{
    if (!v.is_boolean()) {
        fail(path, "must be a boolean");
    }
    return v.get<bool>();
}

const Json& as_array(const Json& v, const std::string& path)
{
    if (!v.is_array()) {
        fail(path, "must be an array");
    }
    return v;
}

/// Tracks which keys of one JSON object were consumed so that leftovers can
/// be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const Json& object, std::string path) : object_(object), path_(std::move(path))
    {
        if (!object_.is_object()) {
            fail(path_.empty() ? std::string("<document>") : path_, "must be an object");
        }
    }

    const std::string& path() const { return path_; }
    std::string key_path(std::string_view key) const { return child(path_, key); }

    const Json* find(std::string_view key)
    {
        const auto it = object_.find(std::string(key));
        if (it == object_.end()) {
            return nullptr;
        }
        used_.insert(std::string(key));
        return &*it;
    }

    bool has(std::string_view key) const { return object_.contains(std::string(key)); }

    const Json& required(std::string_view key)
    {
        const Json* v = find(key);
        if (v == nullptr) {
            throw ConfigError("missing key '" + key_path(key) + "'");
        }
        return *v;
    }

    std::size_t size(std::string_view key) { return as_size(required(key), key_path(key)); }
    double number(std::string_view key) { return as_number(required(key), key_path(key)); }
    std::string string(std::string_view key) { return as_string(required(key), key_path(key)); }

    double number_or(std::string_view key, double fallback)
    {
        const Json* v = find(key);
        return v ? as_number(*v, key_path(key)) : fallback;
    }

    void finish() const
    {
        for (const auto& item : object_.items()) {
            if (!used_.contains(item.key())) {
                throw ConfigError("unknown key '" + key_path(item.key()) + "'");
            }
        }
    }

private:
    const Json& object_;
    std::string path_;
    std::unordered_set<std::string> used_;
};

StepSizePolicy parse_step(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    const std::string kind = r.string("kind");
    StepSizePolicy step;
    if (kind == "lms") {
        step = ConstantMu{r.number("mu")};
    } else if (kind == "nlms") {
        step = Normalized{r.number("alpha")};
    } else {
        fail(r.key_path("kind"), "must be \"lms\" or \"nlms\", got \"" + kind + "\"");
    }
    r.finish();
    return step;
}

Penalty parse_penalty(const Json& j, const std::string& path, std::size_t n)
{
    ObjectReader r(j, path);
    const std::string kind_name = r.string("kind");
    PenaltyKind kind{};
    try {
        kind = penalty_kind_from_string(kind_name);
    } catch (const std::invalid_argument&) {
        fail(r.key_path("kind"), "names an unknown penalty \"" + kind_name + "\"");
    }
    const double delta = r.number_or("delta", kDefaultDelta);
    try {
        if (kind == PenaltyKind::L1 || kind == PenaltyKind::WeightedL1) {
            r.finish();
            return kind == PenaltyKind::L1 ? Penalty::l1(n, delta) : Penalty::weighted_l1(n, delta);
        }
        GroupPartition partition;
        const bool by_size = r.has("group_size");
        const bool explicit_groups = r.has("groups");
        if (by_size == explicit_groups) {
            throw ConfigError("'" + path + "' needs exactly one of 'group_size' or 'groups'");
        }
        if (by_size) {
            const std::size_t size = r.size("group_size");
            if (size == 0) {
                fail(r.key_path("group_size"), "must be positive");
            }
            partition = GroupPartition::contiguous(n, size);
        } else {
            const std::string gpath = r.key_path("groups");
            const Json& arr = as_array(r.required("groups"), gpath);
            std::vector<std::vector<std::size_t>> groups;
            for (std::size_t g = 0; g < arr.size(); ++g) {
                const std::string epath = element(gpath, g);
                const Json& members = as_array(arr[g], epath);
                auto& out = groups.emplace_back();
                for (std::size_t i = 0; i < members.size(); ++i) {
                    out.push_back(as_size(members[i], element(epath, i)));
                }
            }
            try {
                partition = GroupPartition(n, groups);
            } catch (const std::invalid_argument& e) {
                fail(gpath, std::string("is not a partition: ") + e.what());
            }
        }
        r.finish();
        return kind == PenaltyKind::GroupL12 ? Penalty::group_l12(std::move(partition), delta)
                                             : Penalty::weighted_group_l12(std::move(partition), delta);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

RhoPolicy parse_rho(const Json& j, const std::string& path, const InputProcess& input)
{
    ObjectReader r(j, path);
    const std::string rule = r.string("rule");
    RhoPolicy policy;
    if (rule == "fixed") {
        policy.rule = FixedRho{r.number("value")};
    } else if (rule == "white_lms") {
        policy.rule = WhiteInputLmsRho{r.number_or("sigma_x2", stationary_variance(input))};
    } else if (rule == "white_nlms") {
        policy.rule = WhiteInputNlmsRho{};
    } else if (rule == "correlated") {
        policy.rule = CorrelatedInputRho{};
    } else {
        fail(r.key_path("rule"), "names an unknown rule \"" + rule + "\"");
    }
    policy.scale = r.number_or("scale", 1.0);
    r.finish();
    return policy;
}

EtaSpec parse_eta(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    const std::string mode = r.string("mode");
    EtaSpec eta;
    if (mode == "fixed") {
        eta.mode = EtaSpec::Mode::Fixed;
        eta.value = r.number("value");
    } else if (mode == "true") {
        eta.mode = EtaSpec::Mode::TrueValue;
    } else {
        fail(r.key_path("mode"), "must be \"fixed\" or \"true\", got \"" + mode + "\"");
    }
    eta.factor = r.number_or("factor", 1.0);
    r.finish();
    return eta;
}

FilterSpec parse_filter(const Json& j, const std::string& path, std::size_t n, const InputProcess& input)
{
    ObjectReader r(j, path);
    FilterSpec f;
    f.name = r.string("name");
    f.step = parse_step(r.required("step"), r.key_path("step"));
    if (const Json* p = r.find("penalty")) {
        f.penalty = parse_penalty(*p, r.key_path("penalty"), n);
        f.rho = parse_rho(r.required("rho"), r.key_path("rho"), input);
        f.eta = parse_eta(r.required("eta"), r.key_path("eta"));
    } else {
        for (const char* key : {"rho", "eta"}) {
            if (r.has(key)) {
                fail(r.key_path(key), "requires a 'penalty'");
            }
        }
    }
    r.finish();
    return f;
}

SystemSpec parse_system(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    const std::string kind = r.string("kind");
    SystemSpec spec;
    if (kind == "general_sparse") {
        spec.kind = GeneralSparseSpec{r.size("k")};
    } else if (kind == "group_sparse") {
        const std::string bpath = r.key_path("blocks");
        const Json& arr = as_array(r.required("blocks"), bpath);
        GroupSparseSpec groups;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            ObjectReader b(arr[i], element(bpath, i));
            groups.blocks.push_back(Block{b.size("start"), b.size("length")});
            b.finish();
        }
        spec.kind = std::move(groups);
    } else {
        fail(r.key_path("kind"), "must be \"general_sparse\" or \"group_sparse\", got \"" + kind + "\"");
    }
    r.finish();
    return spec;
}

ScheduledEvent parse_event(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    ScheduledEvent ev{r.size("iteration"), ResetActiveValues{}};
    const std::string kind = r.string("kind");
    if (kind == "shift_left") {
        ev.event = ShiftLeft{r.size("taps")};
    } else if (kind == "shift_right") {
        ev.event = ShiftRight{r.size("taps")};
    } else if (kind != "reset_active") {
        fail(r.key_path("kind"), "must be \"shift_left\", \"shift_right\" or \"reset_active\"");
    }
    r.finish();
    return ev;
}

InputProcess parse_input(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    const std::string kind = r.string("kind");
    InputProcess input;
    if (kind == "white") {
        input = WhiteGaussian{r.number_or("variance", 1.0)};
    } else if (kind == "ar1") {
        Ar1 ar{r.number("a"), true};
        if (const Json* v = r.find("normalize")) {
            ar.normalize = as_bool(*v, r.key_path("normalize"));
        }
        input = ar;
    } else {
        fail(r.key_path("kind"), "must be \"white\" or \"ar1\", got \"" + kind + "\"");
    }
    r.finish();
    return input;
}

SweepSpec parse_sweep(const Json& j, const std::string& path)
{
    ObjectReader r(j, path);
    SweepSpec s;
    const std::string fpath = r.key_path("filters");
    const Json& names = as_array(r.required("filters"), fpath);
    for (std::size_t i = 0; i < names.size(); ++i) {
        s.filters.push_back(as_string(names[i], element(fpath, i)));
    }
    s.factor_min = r.number("factor_min");
    s.factor_max = r.number("factor_max");
    s.points = r.size("points");
    s.probe_iteration = r.size("probe_iteration");
    r.finish();
    return s;
}

void validate_sweep(const SweepSpec& s, const Scenario& scenario)
{
    if (s.filters.empty()) {
        throw ConfigError("'sweep.filters' must name at least one filter");
    }
    for (const auto& name : s.filters) {
        const auto it = std::find_if(scenario.filters.begin(), scenario.filters.end(),
                                     [&](const FilterSpec& f) { return f.name == name; });
        if (it == scenario.filters.end()) {
            throw ConfigError("'sweep.filters' names unknown filter '" + name + "'");
        }
        if (!it->penalty) {
            throw ConfigError("'sweep.filters' names unregularized filter '" + name + "'");
        }
    }
    if (!(s.factor_min > 0.0) || !(s.factor_max >= s.factor_min)) {
        throw ConfigError("'sweep' needs 0 < factor_min <= factor_max");
    }
    if (s.points == 0 || (s.points == 1 && s.factor_min != s.factor_max)) {
        throw ConfigError("'sweep.points' must be at least 2 for a non-degenerate range");
    }
    if (s.probe_iteration > scenario.horizon) {
        throw ConfigError("'sweep.probe_iteration' exceeds the horizon");
    }
}

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

Json step_json(const StepSizePolicy& step)
{
    if (const auto* c = std::get_if<ConstantMu>(&step)) {
        return Json{{"kind", "lms"}, {"mu", c->mu}};
    }
    return Json{{"kind", "nlms"}, {"alpha", std::get<Normalized>(step).alpha}};
}

Json penalty_json(const Penalty& p)
{
    Json j{{"kind", std::string(to_string(p.kind()))}, {"delta", p.delta()}};
    if (p.is_group()) {
        const auto& part = p.partition();
        const std::size_t first = part.group_count() > 0 ? part.group(0).size() : 1;
        if (part == GroupPartition::contiguous(part.size(), first)) {
            j["group_size"] = first;
        } else {
            j["groups"] = part.groups();
        }
    }
    return j;
}

Json rho_json(const RhoPolicy& rho)
{
    Json j = std::visit(
        [](const auto& rule) -> Json {
            using T = std::decay_t<decltype(rule)>;
            if constexpr (std::is_same_v<T, FixedRho>) {
                return Json{{"rule", "fixed"}, {"value", rule.rho}};
            } else if constexpr (std::is_same_v<T, WhiteInputLmsRho>) {
                return Json{{"rule", "white_lms"}, {"sigma_x2", rule.sigma_x2}};
            } else if constexpr (std::is_same_v<T, WhiteInputNlmsRho>) {
                return Json{{"rule", "white_nlms"}};
            } else {
                return Json{{"rule", "correlated"}};
            }
        },
        rho.rule);
    j["scale"] = rho.scale;
    return j;
}

Json eta_json(const EtaSpec& eta)
{
    if (eta.mode == EtaSpec::Mode::Fixed) {
        return Json{{"mode", "fixed"}, {"value", eta.value}, {"factor", eta.factor}};
    }
    return Json{{"mode", "true"}, {"factor", eta.factor}};
}

Json event_json(const ScheduledEvent& ev)
{
    Json j{{"iteration", ev.iteration}};
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, ShiftLeft>) {
                j["kind"] = "shift_left";
                j["taps"] = e.taps;
            } else if constexpr (std::is_same_v<T, ShiftRight>) {
                j["kind"] = "shift_right";
                j["taps"] = e.taps;
            } else {
                j["kind"] = "reset_active";
            }
        },
        ev.event);
    return j;
}

} // namespace

ScenarioConfig parse_config(std::string_view text)
{
    const Json doc = parse_json(text);
    ObjectReader r(doc, "");
    ScenarioConfig c;
    Scenario& s = c.scenario;
    s.name = r.string("name");
    if (const Json* d = r.find("description")) {
        c.description = as_string(*d, "description");
    }
    s.n = r.size("N");
    s.horizon = r.size("horizon");
    s.trials = r.size("trials");
    if (const Json* seed = r.find("master_seed")) {
        if (!seed->is_number_unsigned()) {
            fail("master_seed", "must be a non-negative integer");
        }
        s.master_seed = seed->get<std::uint64_t>();
    }
    s.system = parse_system(r.required("system"), "system");
    if (const Json* events = r.find("events")) {
        as_array(*events, "events");
        for (std::size_t i = 0; i < events->size(); ++i) {
            s.system.events.push_back(parse_event((*events)[i], element("events", i)));
        }
    }
    s.input = parse_input(r.required("input"), "input");
    s.noise.variance = r.number("noise_variance");
    const Json& filters = as_array(r.required("filters"), "filters");
    for (std::size_t i = 0; i < filters.size(); ++i) {
        s.filters.push_back(parse_filter(filters[i], element("filters", i), s.n, s.input));
    }
    if (const Json* sweep = r.find("sweep")) {
        c.sweep = parse_sweep(*sweep, "sweep");
    }
    r.finish();

    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
    if (c.sweep) {
        validate_sweep(*c.sweep, s);
    }
    return c;
}

std::string serialize_config(const ScenarioConfig& c)
{
    const Scenario& s = c.scenario;
    Json doc;
    doc["name"] = s.name;
    doc["description"] = c.description;
    doc["N"] = s.n;
    doc["horizon"] = s.horizon;
    doc["trials"] = s.trials;
    doc["master_seed"] = s.master_seed;
    if (const auto* g = std::get_if<GeneralSparseSpec>(&s.system.kind)) {
        doc["system"] = Json{{"kind", "general_sparse"}, {"k", g->k}};
    } else {
        Json blocks = Json::array();
        for (const auto& b : std::get<GroupSparseSpec>(s.system.kind).blocks) {
            blocks.push_back(Json{{"start", b.start}, {"length", b.length}});
        }
        doc["system"] = Json{{"kind", "group_sparse"}, {"blocks", std::move(blocks)}};
    }
    doc["events"] = Json::array();
    for (const auto& ev : s.system.events) {
        doc["events"].push_back(event_json(ev));
    }
    if (const auto* w = std::get_if<WhiteGaussian>(&s.input)) {
        doc["input"] = Json{{"kind", "white"}, {"variance", w->variance}};
    } else {
        const auto& ar = std::get<Ar1>(s.input);
        doc["input"] = Json{{"kind", "ar1"}, {"a", ar.a}, {"normalize", ar.normalize}};
    }
    doc["noise_variance"] = s.noise.variance;
    doc["filters"] = Json::array();
    for (const auto& f : s.filters) {
        Json fj{{"name", f.name}, {"step", step_json(f.step)}};
        if (f.penalty) {
            fj["penalty"] = penalty_json(*f.penalty);
            fj["rho"] = rho_json(f.rho);
            fj["eta"] = eta_json(f.eta);
        }
        doc["filters"].push_back(std::move(fj));
    }
    if (c.sweep) {
        doc["sweep"] = Json{{"filters", c.sweep->filters},
                            {"factor_min", c.sweep->factor_min},
                            {"factor_max", c.sweep->factor_max},
                            {"points", c.sweep->points},
                            {"probe_iteration", c.sweep->probe_iteration}};
    }
    return doc.dump(2) + "\n";
}

std::string apply_overrides(std::string_view text, const std::vector<std::string>& overrides)
{
    Json doc = parse_json(text);
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + o + "' is not of the form key=value");
        }
        const std::string key = o.substr(0, eq);
        const std::string raw = o.substr(eq + 1);

        std::vector<std::string> parts;
        std::stringstream ss(key);
        for (std::string part; std::getline(ss, part, '.');) {
            if (part.empty()) {
                throw ConfigError("override key '" + key + "' has an empty segment");
            }
            parts.push_back(part);
        }

        Json* node = &doc;
        for (const auto& part : parts) {
            if (node->is_array()) {
                std::size_t index = 0;
                const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
                if (ec != std::errc{} || ptr != part.data() + part.size() || index >= node->size()) {
                    throw ConfigError("override key '" + key + "': no element '" + part + "'");
                }
                node = &(*node)[index];
            } else if (node->is_object() || node->is_null()) {
                node = &(*node)[part];
            } else {
                throw ConfigError("override key '" + key + "' descends into a scalar");
            }
        }
        Json value = Json::parse(raw, nullptr, false);
        *node = value.is_discarded() ? Json(raw) : std::move(value);
    }
    return doc.dump(2);
}

std::string load_source(const std::string& name_or_path)
{
    if (const auto* builtin = find_builtin(name_or_path)) {
        return std::string(builtin->document);
    }
    std::ifstream in(name_or_path, std::ios::binary);
    if (!in) {
        throw ConfigError("'" + name_or_path + "' is neither a built-in scenario nor a readable file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

ScenarioConfig load_config(const std::string& name_or_path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed)
{
    std::vector<std::string> all = overrides;
    if (seed) {
        all.push_back("master_seed=" + std::to_string(*seed));
    }
    const std::string text = load_source(name_or_path);
    return parse_config(all.empty() ? text : apply_overrides(text, all));
}

} // namespace rlms::app
