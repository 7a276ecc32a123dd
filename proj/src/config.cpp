#include "ckdv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "ckdv/kernels.hpp"

namespace nlohmann {
template <>
struct adl_serializer<ckdv::Mat2> {
    static void to_json(json& j, const ckdv::Mat2& m) { j = {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}; }
    static void from_json(const json& j, ckdv::Mat2& m) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() ||
            j[1].size() != 2)
            throw ckdv::ConfigError("2x2 matrices are written [[a11, a12], [a21, a22]]");
        m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>();
    }
};
}  // namespace nlohmann

namespace ckdv {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InitialSpec, type, u_amp, u_width, u_shift, v_amp, v_width, v_shift, c,
                                                shift, path)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimulateKnobs, drift_tol, snapshots)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DiagnoseKnobs, snapshot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LipschitzKnobs, deltas, direction_kmax, stabilization_tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScalingKnobs, lambda, T, covariance_tol, norm_lambdas, fit_lambdas,
                                                norm_s, exponent_tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PicardKnobs, amplitudes, T, iterations, time_resolution, agreement_tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ConvergenceKnobs, soliton_c, soliton_tol, soliton_samples, order_n,
                                                order_amplitudes,
                                                order_T, order_dts, order_ref_dt, order_min, order_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BourgainKnobs, fields, field_nx, field_nt, field_period_x,
                                                field_period_t, embedding_sb, intersection_first, intersection_second,
                                                pointwise_triples, pointwise_points, fw_points, constancy_fields,
                                                constancy_s, constancy_b, duhamel_b, duhamel_b_prime, duhamel_sigma,
                                                duhamel_nt, exponent_tol, cv_tol, bilinear, bilinear_bands,
                                                bilinear_trials, bilinear_tol, membership_sb)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(KernelKnobs, lemmas, x_max, rel_tol, stability_tol)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NoneqKnobs, a0, a1, s, b, radii, stabilize_tol)

namespace {

using nlohmann::json;

const std::vector<std::pair<ExperimentKind, std::pair<const char*, const char*>>>& kind_table() {
    static const std::vector<std::pair<ExperimentKind, std::pair<const char*, const char*>>> t{
        {ExperimentKind::Simulate, {"simulate", "simulate"}},
        {ExperimentKind::Diagnose, {"diagnose", "diagnose"}},
        {ExperimentKind::LipschitzProbe, {"lipschitz_probe", "lipschitz"}},
        {ExperimentKind::ScalingProbe, {"scaling_probe", "scaling"}},
        {ExperimentKind::PicardStudy, {"picard_study", "picard"}},
        {ExperimentKind::ConvergenceStudy, {"convergence_study", "convergence"}},
        {ExperimentKind::BourgainSuite, {"bourgain_suite", "bourgain"}},
        {ExperimentKind::KernelSuite, {"kernel_suite", "kernels"}},
        {ExperimentKind::Nonequivalence, {"nonequivalence", "noneq"}}};
    return t;
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    require_object(j, where);
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <typename T>
T read_section(const json& doc, const char* key) {
    T out{};
    if (!doc.contains(key)) return out;
    const json& j = doc.at(key);
    const json defaults = out;
    std::set<std::string> allowed;
    for (const auto& [k, v] : defaults.items()) allowed.insert(k);
    reject_unknown(j, allowed, std::string("section '") + key + "'");
    j.get_to(out);
    return out;
}

void check(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite(double x) { return std::isfinite(x); }

SystemSpec parse_system(const json& j) {
    require_object(j, "section 'system'");
    if (!j.contains("type") || !j.at("type").is_string()) throw ConfigError("system.type is required");
    const std::string type = j.at("type");
    auto num = [&](const char* k, double def) { return j.contains(k) ? j.at(k).get<double>() : def; };
    SystemSpec spec;
    if (type == "hirota_satsuma") {
        reject_unknown(j, {"type", "a", "b"}, "system");
        spec = HirotaSatsuma{num("a", -0.5), num("b", 1.0)};
    } else if (type == "feng") {
        reject_unknown(j, {"type", "a", "b", "c", "d"}, "system");
        spec = Feng{num("a", 0.0), num("b", 0.0), num("c", 0.0), num("d", 0.0)};
    } else if (type == "gear_grimshaw") {
        reject_unknown(j, {"type", "a1", "a2", "a3", "b1", "b2", "r"}, "system");
        spec = GearGrimshaw{num("a1", 0.0), num("a2", 0.0), num("a3", 0.0), num("b1", 1.0), num("b2", 1.0), num("r", 0.0)};
    } else if (type == "general_coupled") {
        reject_unknown(j, {"type", "A", "b", "r"}, "system");
        GeneralCoupled g;
        if (j.contains("A")) g.A = j.at("A").get<Mat2>();
        if (j.contains("b")) {
            const auto b = j.at("b").get<std::vector<double>>();
            check(b.size() == 6, "system.b must list six coefficients");
            std::copy(b.begin(), b.end(), g.b.begin());
        }
        g.r = num("r", 0.0);
        spec = g;
    } else if (type == "sakovich") {
        reject_unknown(j, {"type", "A0", "A1", "A2"}, "system");
        Sakovich s;
        if (j.contains("A0")) s.A0 = j.at("A0").get<Mat2>();
        if (j.contains("A1")) s.A1 = j.at("A1").get<Mat2>();
        if (j.contains("A2")) s.A2 = j.at("A2").get<Mat2>();
        spec = s;
    } else if (type == "canonical") {
        reject_unknown(j, {"type", "D", "C1", "C2", "R"}, "system");
        Bilinear f;
        if (j.contains("D")) f.D = j.at("D").get<Mat2>();
        if (j.contains("C1")) f.C[0] = j.at("C1").get<Mat2>();
        if (j.contains("C2")) f.C[1] = j.at("C2").get<Mat2>();
        if (j.contains("R")) f.R = j.at("R").get<Mat2>();
        spec = f;
    } else {
        throw ConfigError("unknown system type '" + type + "'");
    }
    try {
        validate(spec);
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("system: ") + e.what());
    }
    return spec;
}

json system_json(const SystemSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, HirotaSatsuma>) {
                return {{"type", "hirota_satsuma"}, {"a", s.a}, {"b", s.b}};
            } else if constexpr (std::is_same_v<T, Feng>) {
                return {{"type", "feng"}, {"a", s.a}, {"b", s.b}, {"c", s.c}, {"d", s.d}};
            } else if constexpr (std::is_same_v<T, GearGrimshaw>) {
                return {{"type", "gear_grimshaw"}, {"a1", s.a1}, {"a2", s.a2}, {"a3", s.a3},
                        {"b1", s.b1},              {"b2", s.b2}, {"r", s.r}};
            } else if constexpr (std::is_same_v<T, GeneralCoupled>) {
                return {{"type", "general_coupled"}, {"A", s.A}, {"b", s.b}, {"r", s.r}};
            } else if constexpr (std::is_same_v<T, Sakovich>) {
                return {{"type", "sakovich"}, {"A0", s.A0}, {"A1", s.A1}, {"A2", s.A2}};
            } else {
                return {{"type", "canonical"}, {"D", s.D}, {"C1", s.C[0]}, {"C2", s.C[1]}, {"R", s.R}};
            }
        },
        spec);
}

std::set<std::string> initial_keys(const std::string& type) {
    std::set<std::string> allowed{"type"};
    if (type == "gaussian") allowed.insert({"u_amp", "u_width", "u_shift", "v_amp", "v_width", "v_shift"});
    if (type == "soliton") allowed.insert({"c", "shift"});
    if (type == "snapshot") allowed.insert("path");
    return allowed;
}

json initial_json(const InitialSpec& in) {
    const std::set<std::string> allowed = initial_keys(in.type);
    json all = in, out = json::object();
    for (const auto& [k, v] : all.items())
        if (allowed.count(k)) out[k] = v;
    return out;
}

void validate_initial(const json* raw, const InitialSpec& in) {
    static const std::set<std::string> types{"gaussian", "soliton", "zero", "snapshot"};
    check(types.count(in.type) == 1, "initial.type must be gaussian, soliton, zero or snapshot");
    if (raw) {
        const std::set<std::string> allowed = initial_keys(in.type);
        for (const auto& [k, v] : raw->items())
            if (!allowed.count(k)) throw ConfigError("key '" + k + "' does not apply to initial.type " + in.type);
    }
    for (double x : {in.u_amp, in.u_shift, in.v_amp, in.v_shift, in.shift}) check(finite(x), "initial values must be finite");
    check(in.u_width > 0 && in.v_width > 0 && finite(in.u_width) && finite(in.v_width), "initial widths must be positive");
    check(in.c > 0 && finite(in.c), "initial.c must be positive");
    check(in.type != "snapshot" || !in.path.empty(), "initial.path is required for snapshot data");
}

bool all_positive(const std::vector<double>& v) {
    for (double x : v)
        if (!(x > 0.0) || !finite(x)) return false;
    return true;
}

bool increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

void validate(const ExperimentConfig& c) {
    check(c.n >= 16 && c.n <= (1 << 20) && (c.n & (c.n - 1)) == 0, "grid.n must be a power of two in [16, 2^20]");
    check(c.period > 0 && finite(c.period), "grid.period must be positive");
    check(c.dt != 0.0 && finite(c.dt) && std::abs(c.dt) <= 1.0, "stepper.dt must be nonzero with |dt| <= 1");
    check(finite(c.T), "stepper.T must be finite");
    check(c.sample_interval > 0 && finite(c.sample_interval), "stepper.sample_interval must be positive");
    check(finite(c.sobolev_s), "sobolev_s must be finite");
    check(!c.output_dir.empty(), "output_dir must not be empty");

    check(c.simulate.drift_tol > 0, "simulate.drift_tol must be positive");
    if (c.kind == ExperimentKind::Diagnose) check(!c.diagnose.snapshot.empty(), "diagnose.snapshot is required");

    const auto& l = c.lipschitz;
    check(!l.deltas.empty() && all_positive(l.deltas), "lipschitz.deltas must be positive");
    for (double d : l.deltas) check(d < 1.0, "lipschitz.deltas must be below 1");
    check(l.direction_kmax >= 1, "lipschitz.direction_kmax must be >= 1");
    check(l.stabilization_tol > 0, "lipschitz.stabilization_tol must be positive");

    const auto& s = c.scaling;
    check(s.lambda > 0 && finite(s.lambda), "scaling.lambda must be positive");
    check(s.T >= 0 && finite(s.T), "scaling.T must be non-negative");
    check(all_positive(s.norm_lambdas) && all_positive(s.fit_lambdas), "scaling lambdas must be positive");
    check(s.fit_lambdas.size() >= 2, "scaling.fit_lambdas needs at least two values");
    for (double x : s.norm_s) check(finite(x), "scaling.norm_s must be finite");
    check(s.covariance_tol > 0 && s.exponent_tol > 0, "scaling tolerances must be positive");

    const auto& p = c.picard;
    check(!p.amplitudes.empty() && all_positive(p.amplitudes), "picard.amplitudes must be positive");
    check(p.T > 0 && finite(p.T), "picard.T must be positive");
    check(p.iterations >= 1, "picard.iterations must be >= 1");
    check(p.time_resolution >= 3, "picard.time_resolution must be >= 3");
    check(p.agreement_tol > 0, "picard.agreement_tol must be positive");

    const auto& v = c.convergence;
    check(v.soliton_c > 0 && v.soliton_tol > 0 && v.soliton_samples >= 1, "convergence soliton knobs out of range");
    check(v.order_n >= 16 && (v.order_n & (v.order_n - 1)) == 0, "convergence.order_n must be a power of two >= 16");
    check(v.order_amplitudes.size() == 2, "convergence.order_amplitudes lists the u and v amplitudes");
    check(v.order_T > 0, "convergence.order_T must be positive");
    check(v.order_dts.size() == 2 && all_positive(v.order_dts) && v.order_dts[1] < v.order_dts[0],
          "convergence.order_dts must list a decreasing pair");
    check(v.order_ref_dt > 0 && v.order_ref_dt < v.order_dts[1], "convergence.order_ref_dt must be the smallest step");
    check(v.order_min < v.order_max, "convergence.order_min must be below order_max");

    const auto& b = c.bourgain;
    check(b.fields >= 1, "bourgain.fields must be >= 1");
    check(b.field_nx >= 2 && b.field_nx % 2 == 0 && b.field_nt >= 2 && b.field_nt % 2 == 0,
          "bourgain field sizes must be even");
    check(b.field_period_x > 0 && b.field_period_t > 0, "bourgain field periods must be positive");
    for (const auto& sb : b.embedding_sb) check(sb.size() == 2 && sb[1] >= 0, "bourgain.embedding_sb entries are [s, b] with b >= 0");
    check(b.intersection_first.size() == 2 && b.intersection_second.size() == 2, "intersection pairs need two entries");
    for (const auto* pr : {&b.intersection_first, &b.intersection_second})
        check((*pr)[0] != 0 && (*pr)[1] != 0 && (*pr)[0] != (*pr)[1], "intersection pairs must be distinct and nonzero");
    check(b.pointwise_triples >= 1 && b.pointwise_points >= 2 && b.fw_points >= 2, "bourgain scan sizes out of range");
    check(b.constancy_fields >= 2, "bourgain.constancy_fields must be >= 2");
    check(b.duhamel_b_prime > -0.5 && b.duhamel_b_prime <= 0 && b.duhamel_b >= 0 && b.duhamel_b <= b.duhamel_b_prime + 1,
          "bourgain duhamel parameters need -1/2 < b' <= 0 <= b <= b' + 1");
    check(b.duhamel_nt >= 64 && b.duhamel_nt % 2 == 0, "bourgain.duhamel_nt must be even and >= 64");
    check(b.exponent_tol > 0 && b.cv_tol > 0 && b.bilinear_tol > 0, "bourgain tolerances must be positive");
    check(b.bilinear_bands.size() >= 2, "bourgain.bilinear_bands needs at least two bands");
    for (int band : b.bilinear_bands) check(band >= 1, "bilinear bands must be >= 1");
    check(b.bilinear_trials >= 1, "bourgain.bilinear_trials must be >= 1");
    check(b.membership_sb.size() == 2 && b.membership_sb[1] >= 0, "bourgain.membership_sb is [s, b] with b >= 0");

    const auto& k = c.kernels;
    check(!k.lemmas.empty(), "kernels.lemmas must not be empty");
    for (const auto& name : k.lemmas) {
        try {
            kernel_from_name(name);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    check(k.x_max > 0 && k.rel_tol > 0 && k.stability_tol > 0, "kernels knobs must be positive");

    const auto& q = c.noneq;
    check(q.b > 0.5, "noneq.b must exceed 1/2");
    check(q.a0 != 0 && q.a1 != 0, "noneq.a0 and noneq.a1 must be nonzero");
    check(q.radii.size() >= 2 && all_positive(q.radii) && increasing(q.radii), "noneq.radii must be increasing");
    check(q.s > 0.5 - q.b || (q.s >= -1.5 && q.s <= 0.0), "noneq.s must satisfy s > 1/2 - b or -3/2 <= s <= 0");
    check(q.stabilize_tol > 0, "noneq.stabilize_tol must be positive");
}

}  // namespace

std::string kind_name(ExperimentKind k) {
    for (const auto& [kind, names] : kind_table())
        if (kind == k) return names.first;
    return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
    for (const auto& [kind, names] : kind_table())
        if (name == names.first || name == names.second) return kind;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const json& doc, std::optional<ExperimentKind> kind) {
    try {
        reject_unknown(doc,
                       {"kind", "system", "grid", "stepper", "initial", "sobolev_s", "seed", "output_dir", "simulate",
                        "diagnose", "lipschitz", "scaling", "picard", "convergence", "bourgain", "kernels", "noneq"},
                       "config");
        ExperimentConfig c;
        if (doc.contains("kind")) {
            const ExperimentKind k = kind_from_name(doc.at("kind").get<std::string>());
            if (kind && *kind != k)
                throw ConfigError("config kind '" + kind_name(k) + "' does not match '" + kind_name(*kind) + "'");
            c.kind = k;
        } else if (kind) {
            c.kind = *kind;
        } else {
            throw ConfigError("config has no 'kind'");
        }
        if (doc.contains("system")) c.system = parse_system(doc.at("system"));
        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            reject_unknown(g, {"n", "period"}, "section 'grid'");
            c.n = g.value("n", c.n);
            c.period = g.value("period", c.period);
        }
        if (doc.contains("stepper")) {
            const json& s = doc.at("stepper");
            reject_unknown(s, {"dt", "T", "sample_interval"}, "section 'stepper'");
            c.dt = s.value("dt", c.dt);
            c.T = s.value("T", c.T);
            c.sample_interval = s.value("sample_interval", c.sample_interval);
        }
        const json* raw_initial = nullptr;
        if (doc.contains("initial")) {
            raw_initial = &doc.at("initial");
            c.initial = read_section<InitialSpec>(doc, "initial");
        }
        validate_initial(raw_initial, c.initial);
        c.sobolev_s = doc.value("sobolev_s", c.sobolev_s);
        c.seed = doc.value("seed", c.seed);
        c.output_dir = doc.value("output_dir", c.output_dir);
        c.simulate = read_section<SimulateKnobs>(doc, "simulate");
        c.diagnose = read_section<DiagnoseKnobs>(doc, "diagnose");
        c.lipschitz = read_section<LipschitzKnobs>(doc, "lipschitz");
        c.scaling = read_section<ScalingKnobs>(doc, "scaling");
        c.picard = read_section<PicardKnobs>(doc, "picard");
        c.convergence = read_section<ConvergenceKnobs>(doc, "convergence");
        c.bourgain = read_section<BourgainKnobs>(doc, "bourgain");
        c.kernels = read_section<KernelKnobs>(doc, "kernels");
        c.noneq = read_section<NoneqKnobs>(doc, "noneq");
        validate(c);
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc, kind);
}

json to_json(const ExperimentConfig& c) {
    return {{"kind", kind_name(c.kind)},
            {"system", system_json(c.system)},
            {"grid", {{"n", c.n}, {"period", c.period}}},
            {"stepper", {{"dt", c.dt}, {"T", c.T}, {"sample_interval", c.sample_interval}}},
            {"initial", initial_json(c.initial)},
            {"sobolev_s", c.sobolev_s},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"simulate", c.simulate},
            {"diagnose", c.diagnose},
            {"lipschitz", c.lipschitz},
            {"scaling", c.scaling},
            {"picard", c.picard},
            {"convergence", c.convergence},
            {"bourgain", c.bourgain},
            {"kernels", c.kernels},
            {"noneq", c.noneq}};
}

}  // namespace ckdv
