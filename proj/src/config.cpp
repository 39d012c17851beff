#include "wirefilm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wf {

using nlohmann::json;

namespace {

// moments of t^e over (-1/2,1/2) and over (-1,0)
double theta_moment(int e)
{
    if (e % 2 == 1) return 0.0;
    return 1.0 / ((e + 1) * std::pow(2.0, e));
}

double depth_moment(int e)
{
    return (e % 2 == 0 ? 1.0 : -1.0) / (e + 1);
}

FieldPreset parse_preset(const json& j, const char* which)
{
    FieldPreset p;
    if (j.is_string() && j.get<std::string>() == "Zero") {
        p.kind = FieldPreset::Kind::zero;
        return p;
    }
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError(std::string(which) + ": preset must be \"Zero\" or an object with kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Zero") {
        p.kind = FieldPreset::Kind::zero;
    } else if (kind == "Constant") {
        p.kind = FieldPreset::Kind::constant;
        const auto v = j.at("value");
        for (int c = 0; c < 3; ++c) p.value[std::size_t(c)] = v.at(c).get<double>();
    } else if (kind == "AxisSine") {
        p.kind = FieldPreset::Kind::axis_sine;
        p.axis = j.at("axis").get<int>();
        p.amplitude = j.at("amplitude").get<double>();
        if (p.axis < 1 || p.axis > 3)
            throw ConfigError(std::string(which) + ": AxisSine axis must be 1..3");
    } else if (kind == "Polynomial") {
        p.kind = FieldPreset::Kind::polynomial;
        for (const auto& t : j.at("terms")) {
            FieldPreset::Term term;
            term.component = t.at("component").get<int>();
            if (term.component < 1 || term.component > 3)
                throw ConfigError(std::string(which) + ": polynomial component must be 1..3");
            const auto pw = t.at("powers");
            for (int c = 0; c < 3; ++c) term.powers[std::size_t(c)] = pw.at(c).get<int>();
            term.coeff = t.at("coeff").get<double>();
            p.terms.push_back(term);
        }
    } else {
        throw ConfigError(std::string(which) + ": unknown preset kind " + kind);
    }
    return p;
}

json preset_to_json(const FieldPreset& p)
{
    json j;
    switch (p.kind) {
        case FieldPreset::Kind::zero: j["kind"] = "Zero"; break;
        case FieldPreset::Kind::constant:
            j["kind"] = "Constant";
            j["value"] = {p.value[0], p.value[1], p.value[2]};
            break;
        case FieldPreset::Kind::axis_sine:
            j["kind"] = "AxisSine";
            j["axis"] = p.axis;
            j["amplitude"] = p.amplitude;
            break;
        case FieldPreset::Kind::polynomial: {
            j["kind"] = "Polynomial";
            j["terms"] = json::array();
            for (const auto& t : p.terms)
                j["terms"].push_back({{"component", t.component},
                                      {"powers", {t.powers[0], t.powers[1], t.powers[2]}},
                                      {"coeff", t.coeff}});
            break;
        }
    }
    return j;
}

std::string pair_str(double ha, double hb)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << ha << ", " << hb << ")";
    return os.str();
}

void validate_schedule(const RunConfig& cfg)
{
    const auto& sched = cfg.thickness_schedule;
    if (sched.empty()) throw ConfigError("thickness_schedule must not be empty");
    for (const auto& [ha, hb] : sched)
        if (!(ha > 0.0 && ha < 1.0 && hb > 0.0 && hb < 1.0))
            throw ConfigError("thickness pair outside (0,1): " + pair_str(ha, hb));

    if (cfg.regime == Regime::finite) {
        if (!(cfg.ell > 0.0)) throw ConfigError("finite regime needs ell > 0");
        for (const auto& [ha, hb] : sched) {
            const double want = cfg.ell * ha * ha;
            if (std::abs(hb - want) > 1e-9 * std::max(hb, want))
                throw ConfigError("finite regime needs h_b = ell*h_a^2; offending pair " +
                                  pair_str(ha, hb));
        }
    } else if (cfg.regime == Regime::zero) {
        double prev = 0.0;
        for (std::size_t i = 0; i < sched.size(); ++i) {
            const double ratio = sched[i].second / (sched[i].first * sched[i].first);
            if (i > 0 && !(ratio < prev))
                throw ConfigError(
                    "zero regime needs strictly decreasing h_b/h_a^2; offending pair " +
                    pair_str(sched[i].first, sched[i].second));
            prev = ratio;
        }
    } else {
        double prev = 0.0;
        for (std::size_t i = 0; i < sched.size(); ++i) {
            const auto [ha, hb] = sched[i];
            const double ratio = hb / (ha * ha);
            if (i > 0 && !(ratio > prev))
                throw ConfigError(
                    "infinity regime needs strictly increasing h_b/h_a^2; offending pair " +
                    pair_str(ha, hb));
            prev = ratio;
            if (!(hb < std::sqrt(ha)))
                throw ConfigError("infinity regime needs h_b < sqrt(h_a); offending pair " +
                                  pair_str(ha, hb));
        }
    }
}

}  // namespace

std::array<double, 3> FieldPreset::eval(double x1, double x2, double x3) const
{
    std::array<double, 3> f{0.0, 0.0, 0.0};
    switch (kind) {
        case Kind::zero: break;
        case Kind::constant: f = value; break;
        case Kind::axis_sine: {
            const double x = axis == 1 ? x1 : axis == 2 ? x2 : x3;
            f[std::size_t(axis - 1)] = amplitude * std::sin(M_PI * x);
            break;
        }
        case Kind::polynomial:
            for (const auto& t : terms)
                f[std::size_t(t.component - 1)] += t.coeff * std::pow(x1, t.powers[0]) *
                                                   std::pow(x2, t.powers[1]) *
                                                   std::pow(x3, t.powers[2]);
            break;
    }
    return f;
}

RunConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        RunConfig cfg;
        const auto& reg = j.at("regime");
        if (reg.is_string()) {
            const std::string r = reg.get<std::string>();
            if (r == "Zero")
                cfg.regime = Regime::zero;
            else if (r == "Infinity")
                cfg.regime = Regime::infinity;
            else
                throw ConfigError("regime must be \"Zero\", \"Infinity\" or {\"Finite\": ell}");
        } else if (reg.is_object() && reg.contains("Finite")) {
            cfg.regime = Regime::finite;
            cfg.ell = reg.at("Finite").get<double>();
        } else {
            throw ConfigError("regime must be \"Zero\", \"Infinity\" or {\"Finite\": ell}");
        }
        cfg.alpha = j.at("alpha").get<double>();
        cfg.beta = j.at("beta").get<double>();
        if (!(cfg.alpha > 0.0) || !(cfg.beta > 0.0))
            throw ConfigError("alpha and beta must be positive");
        for (int c = 0; c < 3; ++c) {
            cfg.grid_a[std::size_t(c)] = j.at("grid_a").at(c).get<int>();
            cfg.grid_b[std::size_t(c)] = j.at("grid_b").at(c).get<int>();
        }
        cfg.grid_1d = j.at("grid_1d").get<int>();
        cfg.grid_2d = {j.at("grid_2d").at(0).get<int>(), j.at("grid_2d").at(1).get<int>()};
        for (const auto& p : j.at("thickness_schedule"))
            cfg.thickness_schedule.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        cfg.field_preset_a = parse_preset(j.at("field_preset_a"), "field_preset_a");
        cfg.field_preset_b = parse_preset(j.at("field_preset_b"), "field_preset_b");
        if (j.contains("optimizer")) {
            const auto& o = j.at("optimizer");
            auto get = [&](const char* key, double dflt) {
                return o.contains(key) ? o.at(key).get<double>() : dflt;
            };
            cfg.optimizer.max_iters = int(get("max_iters", 5000));
            cfg.optimizer.grad_tol = get("grad_tol", 1e-6);
            cfg.optimizer.armijo_c = get("armijo_c", 1e-4);
            cfg.optimizer.backtrack_factor = get("backtrack_factor", 0.5);
            cfg.optimizer.init_step = get("init_step", 1.0);
            cfg.optimizer.restarts = int(get("restarts", 4));
            if (o.contains("init_kind")) {
                const std::string k = o.at("init_kind").get<std::string>();
                if (k == "Zero")
                    cfg.optimizer.init_kind = InitKind::zero;
                else if (k == "RandomUnitish")
                    cfg.optimizer.init_kind = InitKind::random_unitish;
                else if (k == "Lifted")
                    cfg.optimizer.init_kind = InitKind::lifted;
                else
                    throw ConfigError("unknown init_kind " + k);
            }
            if (!(cfg.optimizer.armijo_c > 0.0 && cfg.optimizer.armijo_c < 1.0))
                throw ConfigError("armijo_c must lie in (0,1)");
            if (!(cfg.optimizer.backtrack_factor > 0.0 && cfg.optimizer.backtrack_factor < 1.0))
                throw ConfigError("backtrack_factor must lie in (0,1)");
            if (cfg.optimizer.restarts < 1) throw ConfigError("restarts must be >= 1");
        }
        if (j.contains("junction_zero")) cfg.junction_zero = j.at("junction_zero").get<bool>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.output_path = j.at("output_path").get<std::string>();
        validate_schedule(cfg);
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg)
{
    json j;
    if (cfg.regime == Regime::finite)
        j["regime"] = {{"Finite", cfg.ell}};
    else
        j["regime"] = cfg.regime == Regime::zero ? "Zero" : "Infinity";
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["grid_a"] = {cfg.grid_a[0], cfg.grid_a[1], cfg.grid_a[2]};
    j["grid_b"] = {cfg.grid_b[0], cfg.grid_b[1], cfg.grid_b[2]};
    j["grid_1d"] = cfg.grid_1d;
    j["grid_2d"] = {cfg.grid_2d[0], cfg.grid_2d[1]};
    j["thickness_schedule"] = json::array();
    for (const auto& [ha, hb] : cfg.thickness_schedule)
        j["thickness_schedule"].push_back({ha, hb});
    j["field_preset_a"] = preset_to_json(cfg.field_preset_a);
    j["field_preset_b"] = preset_to_json(cfg.field_preset_b);
    j["optimizer"] = {{"max_iters", cfg.optimizer.max_iters},
                      {"grad_tol", cfg.optimizer.grad_tol},
                      {"armijo_c", cfg.optimizer.armijo_c},
                      {"backtrack_factor", cfg.optimizer.backtrack_factor},
                      {"init_step", cfg.optimizer.init_step},
                      {"restarts", cfg.optimizer.restarts},
                      {"init_kind", cfg.optimizer.init_kind == InitKind::zero ? "Zero"
                                    : cfg.optimizer.init_kind == InitKind::random_unitish
                                        ? "RandomUnitish"
                                        : "Lifted"}};
    j["junction_zero"] = cfg.junction_zero;
    j["seed"] = cfg.seed;
    j["output_path"] = cfg.output_path;
    return j.dump(2);
}

std::vector<std::pair<double, double>> make_finite_schedule(double ell,
                                                            const std::vector<double>& h_a)
{
    std::vector<std::pair<double, double>> s;
    for (double ha : h_a) s.emplace_back(ha, ell * ha * ha);
    return s;
}

std::vector<std::pair<double, double>> make_zero_schedule(const std::vector<double>& h_a,
                                                          double exponent)
{
    std::vector<std::pair<double, double>> s;
    for (double ha : h_a) s.emplace_back(ha, std::pow(ha, exponent));
    return s;
}

std::vector<std::pair<double, double>> make_infinity_schedule(const std::vector<double>& h_a,
                                                              double exponent)
{
    std::vector<std::pair<double, double>> s;
    for (double ha : h_a) s.emplace_back(ha, std::pow(ha, exponent));
    return s;
}

VectorField3 materialize_field(const FieldPreset& preset, const Grid3& g)
{
    VectorField3 f = VectorField3::zeros(g);
    for (int k = 0; k < g.n3; ++k)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const auto v = preset.eval(g.x1(i), g.x2(j), g.x3(k));
                const std::size_t id = g.idx(i, j, k);
                f.comp[0][id] = v[0];
                f.comp[1][id] = v[1];
                f.comp[2][id] = v[2];
            }
    return f;
}

std::vector<double> f3_profile_1d(const FieldPreset& preset, const Grid1& g)
{
    std::vector<double> out(std::size_t(g.n), 0.0);
    for (int k = 0; k < g.n; ++k) {
        const double x3 = g.x(k);
        double v = 0.0;
        switch (preset.kind) {
            case FieldPreset::Kind::zero: break;
            case FieldPreset::Kind::constant: v = preset.value[2]; break;
            case FieldPreset::Kind::axis_sine:
                if (preset.axis == 3) v = preset.amplitude * std::sin(M_PI * x3);
                break;
            case FieldPreset::Kind::polynomial:
                for (const auto& t : preset.terms)
                    if (t.component == 3)
                        v += t.coeff * theta_moment(t.powers[0]) * theta_moment(t.powers[1]) *
                             std::pow(x3, t.powers[2]);
                break;
        }
        out[std::size_t(k)] = v;
    }
    return out;
}

std::array<std::vector<double>, 2> f12_profile_2d(const FieldPreset& preset, const Grid2& g)
{
    std::array<std::vector<double>, 2> out;
    for (auto& o : out) o.assign(g.num_nodes(), 0.0);
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i) {
            const std::size_t id = g.idx(i, j);
            const double x1 = g.x1(i), x2 = g.x2(j);
            switch (preset.kind) {
                case FieldPreset::Kind::zero: break;
                case FieldPreset::Kind::constant:
                    out[0][id] = preset.value[0];
                    out[1][id] = preset.value[1];
                    break;
                case FieldPreset::Kind::axis_sine:
                    if (preset.axis == 1)
                        out[0][id] = preset.amplitude * std::sin(M_PI * x1);
                    else if (preset.axis == 2)
                        out[1][id] = preset.amplitude * std::sin(M_PI * x2);
                    // axis 3: depth integral of sin(pi*x3) over (-1,0) is -2/pi,
                    // but it lands on the third component, which the in-plane
                    // profile does not carry
                    break;
                case FieldPreset::Kind::polynomial:
                    for (const auto& t : preset.terms)
                        if (t.component == 1 || t.component == 2)
                            out[std::size_t(t.component - 1)][id] +=
                                t.coeff * std::pow(x1, t.powers[0]) *
                                std::pow(x2, t.powers[1]) * depth_moment(t.powers[2]);
                    break;
            }
        }
    return out;
}

std::string regime_name(Regime r)
{
    switch (r) {
        case Regime::finite: return "finite";
        case Regime::zero: return "zero";
        case Regime::infinity: return "infinity";
    }
    return "?";
}

namespace {

json breakdown_to_json(const EnergyBreakdown& b)
{
    return json{{"rot", b.rot_term},
                {"div", b.div_term},
                {"fullgrad", b.fullgrad_term},
                {"doublewell", b.doublewell_term},
                {"nonlocal", b.nonlocal_term},
                {"external", b.external_term},
                {"total", b.total},
                {"scale_a", b.scale_a},
                {"scale_b", b.scale_b},
                {"full_gradient_form", b.full_gradient_form}};
}

}  // namespace

void write_results(const std::vector<SweepRow>& rows, const std::string& path)
{
    if (rows.empty()) throw ConfigError("write_results: no rows to write");

    std::ofstream csv(path);
    if (!csv) throw ConfigError("write_results: cannot open " + path);
    csv.precision(17);
    csv << kSweepCsvHeader << "\n";
    for (const auto& r : rows) {
        csv << r.h_a << "," << r.h_b << "," << r.ratio << "," << r.regime << ","
            << r.e3d_scaled << "," << r.s3d_scaled << "," << r.e_limit << "," << r.gap << ","
            << r.iters << "," << r.restarts << "," << r.norm_p_a_l4 << ","
            << r.norm_p_b_l4_scaled << "\n";
    }
    if (!csv) throw ConfigError("write_results: failed writing " + path);

    std::string jpath = path;
    const auto dot = jpath.find_last_of('.');
    if (dot != std::string::npos)
        jpath = jpath.substr(0, dot) + ".json";
    else
        jpath += ".json";

    json arr = json::array();
    for (const auto& r : rows) {
        json j{{"h_a", r.h_a},
               {"h_b", r.h_b},
               {"ratio", r.ratio},
               {"regime", r.regime},
               {"E3d_scaled", r.e3d_scaled},
               {"S3d_scaled", r.s3d_scaled},
               {"E_limit", r.e_limit},
               {"gap", r.gap},
               {"iters", r.iters},
               {"restarts", r.restarts},
               {"norm_p_a_L4", r.norm_p_a_l4},
               {"norm_p_b_L4_scaled", r.norm_p_b_l4_scaled},
               {"S3d_scaled_parallel_e3", r.s3d_scaled_par_e3},
               {"E3d_over_omega", r.e3d_over_omega},
               {"S3d_over_omega", r.s3d_over_omega},
               {"omega_measure", r.omega_measure},
               {"intro_split_limit", r.intro_split_limit},
               {"gap_intro_split", r.gap_intro_split},
               {"lift_scaled", r.lift_scaled},
               {"lift_gap", r.lift_gap},
               {"diag_norms",
                {{"a_l4", r.diag_a4}, {"b_l4", r.diag_b4}, {"a_grad_l2", r.diag_da},
                 {"b_grad_l2", r.diag_db}}},
               {"e_converged", r.e_converged},
               {"s_converged", r.s_converged},
               {"e_breakdown", breakdown_to_json(r.e_breakdown)},
               {"s_breakdown", breakdown_to_json(r.s_breakdown)},
               {"e_restart_energies", r.e_restart_energies}};
        arr.push_back(std::move(j));
    }
    std::ofstream js(jpath);
    if (!js) throw ConfigError("write_results: cannot open " + jpath);
    js << arr.dump(1) << "\n";
    if (!js) throw ConfigError("write_results: failed writing " + jpath);
}

}  // namespace wf
