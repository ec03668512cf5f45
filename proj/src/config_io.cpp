#include "oc/config_io.hpp"

#include "oc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace oc {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ValidationError("config: key '" + key + "' has a malformed number: " + value);
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ValidationError("config: key '" + key + "' has a malformed integer: " + value);
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ValidationError("config: key '" + key + "' has an empty list entry");
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ValidationError("config: key '" + key + "' has an empty list");
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

using Section = std::map<std::string, std::string>;

} // namespace

PhysicsConfig parse_config_text(std::string_view text) {
    std::map<std::string, Section> sections;
    std::string current = "";
    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        // strip comments
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
            current = lower(trim(line.substr(1, line.size() - 2)));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": empty key or value");
        if (!sections[current].emplace(key, value).second)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": duplicate key '" + key + "'");
    }

    PhysicsConfig cfg;
    auto take = [&sections](const std::string& sec, const std::string& key,
                            std::string* out) {
        auto s = sections.find(sec);
        if (s == sections.end()) return false;
        auto it = s->second.find(key);
        if (it == s->second.end()) return false;
        *out = it->second;
        s->second.erase(it);
        return true;
    };
    std::string v;

    if (take("geometry", "kind", &v)) {
        const std::string k = lower(v);
        if (k == "interval1d" || k == "1d")
            cfg.geometry.kind = GeometryKind::Interval1D;
        else if (k == "radial3d" || k == "3d" || k == "radialchannels3d")
            cfg.geometry.kind = GeometryKind::RadialChannels3D;
        else
            throw ValidationError("config: geometry.kind must be interval1d or radial3d");
    }

    auto& pert = cfg.potentials.perturbation;
    if (take("potential", "type", &v)) {
        const std::string k = lower(v);
        if (k == "square")
            pert.shape = PerturbationShape::Square;
        else if (k == "gaussian")
            pert.shape = PerturbationShape::Gaussian;
        else if (k == "table")
            pert.shape = PerturbationShape::Table;
        else
            throw ValidationError("config: potential.type must be square, gaussian or table");
    }
    if (take("potential", "amplitude", &v)) pert.amplitude = parse_double("amplitude", v);
    if (take("potential", "width", &v)) pert.width = parse_double("width", v);
    if (take("potential", "support_radius", &v))
        pert.support_radius = parse_double("support_radius", v);
    if (take("potential", "table_x", &v)) pert.table.x = parse_list("table_x", v);
    if (take("potential", "table_v", &v)) pert.table.v = parse_list("table_v", v);

    auto& bg = cfg.potentials.background;
    if (take("potential", "background", &v)) {
        const std::string k = lower(v);
        if (k == "none" || k == "zero")
            bg.shape = BackgroundShape::Zero;
        else if (k == "constant")
            bg.shape = BackgroundShape::Constant;
        else if (k == "cosine")
            bg.shape = BackgroundShape::Cosine;
        else
            throw ValidationError("config: potential.background must be none, constant or cosine");
    }
    if (take("potential", "background_amplitude", &v))
        bg.amplitude = parse_double("background_amplitude", v);
    if (take("potential", "background_period", &v))
        bg.period = parse_double("background_period", v);

    if (take("grid", "h", &v)) cfg.grid.spacing = parse_double("h", v);

    if (take("sweep", "fermi_energies", &v)) cfg.fermi_energies = parse_list("fermi_energies", v);
    if (take("sweep", "l", &v)) cfg.L_schedule = parse_list("L", v);
    if (take("sweep", "smear_width", &v)) cfg.smear_width = parse_double("smear_width", v);
    if (take("sweep", "lmax", &v)) {
        const std::string k = lower(v);
        if (k == "auto" || k == "automatic") {
            cfg.lmax_policy = LmaxPolicy::Automatic;
        } else {
            cfg.lmax_policy = LmaxPolicy::Fixed;
            cfg.lmax_fixed = parse_int("lmax", v);
        }
    }
    if (take("sweep", "scattering_step", &v))
        cfg.scattering_step = parse_double("scattering_step", v);

    auto& tol = cfg.tol;
    if (take("tolerances", "eigenvalue", &v)) tol.eigenvalue = parse_double("eigenvalue", v);
    if (take("tolerances", "cluster", &v)) tol.cluster = parse_double("cluster", v);
    if (take("tolerances", "degeneracy", &v)) tol.degeneracy = parse_double("degeneracy", v);
    if (take("tolerances", "residual", &v)) tol.residual = parse_double("residual", v);
    if (take("tolerances", "orthogonality", &v))
        tol.orthogonality = parse_double("orthogonality", v);
    if (take("tolerances", "unitarity", &v)) tol.unitarity = parse_double("unitarity", v);
    if (take("tolerances", "det", &v)) tol.det = parse_double("det", v);
    if (take("tolerances", "tail", &v)) tol.tail = parse_double("tail", v);
    if (take("tolerances", "scaling", &v)) tol.scaling = parse_double("scaling", v);
    if (take("tolerances", "coupling_floor", &v))
        tol.coupling_floor = parse_double("coupling_floor", v);
    if (take("tolerances", "max_inverse_iterations", &v))
        tol.max_inverse_iterations = parse_int("max_inverse_iterations", v);

    if (take("run", "workers", &v)) cfg.workers = parse_int("workers", v);

    for (const auto& [sec, kv] : sections)
        for (const auto& [key, val] : kv)
            throw ValidationError("config: unknown key '" + key + "' in section [" + sec + "]");

    return cfg;
}

PhysicsConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_echo(const PhysicsConfig& cfg) {
    std::ostringstream os;
    os << "[geometry]\n";
    os << "kind = "
       << (cfg.geometry.kind == GeometryKind::Interval1D ? "interval1d" : "radial3d") << "\n";

    const auto& pert = cfg.potentials.perturbation;
    os << "\n[potential]\n";
    os << "type = "
       << (pert.shape == PerturbationShape::Square
               ? "square"
               : pert.shape == PerturbationShape::Gaussian ? "gaussian" : "table")
       << "\n";
    os << "amplitude = " << format_double(pert.amplitude) << "\n";
    if (pert.shape == PerturbationShape::Gaussian)
        os << "width = " << format_double(pert.width) << "\n";
    os << "support_radius = " << format_double(pert.support_radius) << "\n";
    if (pert.shape == PerturbationShape::Table) {
        os << "table_x = ";
        for (std::size_t i = 0; i < pert.table.x.size(); ++i)
            os << (i ? ", " : "") << format_double(pert.table.x[i]);
        os << "\ntable_v = ";
        for (std::size_t i = 0; i < pert.table.v.size(); ++i)
            os << (i ? ", " : "") << format_double(pert.table.v[i]);
        os << "\n";
    }
    const auto& bg = cfg.potentials.background;
    os << "background = "
       << (bg.shape == BackgroundShape::Zero
               ? "none"
               : bg.shape == BackgroundShape::Constant ? "constant" : "cosine")
       << "\n";
    if (bg.shape != BackgroundShape::Zero)
        os << "background_amplitude = " << format_double(bg.amplitude) << "\n";
    if (bg.shape == BackgroundShape::Cosine)
        os << "background_period = " << format_double(bg.period) << "\n";

    os << "\n[grid]\n";
    os << "h = " << format_double(cfg.grid.spacing) << "\n";

    os << "\n[sweep]\n";
    os << "fermi_energies = ";
    for (std::size_t i = 0; i < cfg.fermi_energies.size(); ++i)
        os << (i ? ", " : "") << format_double(cfg.fermi_energies[i]);
    os << "\nL = ";
    for (std::size_t i = 0; i < cfg.L_schedule.size(); ++i)
        os << (i ? ", " : "") << format_double(cfg.L_schedule[i]);
    os << "\n";
    os << "smear_width = " << format_double(cfg.smear_width) << "\n";
    if (cfg.lmax_policy == LmaxPolicy::Automatic)
        os << "lmax = auto\n";
    else
        os << "lmax = " << cfg.lmax_fixed << "\n";
    if (cfg.scattering_step > 0.0)
        os << "scattering_step = " << format_double(cfg.scattering_step) << "\n";

    const auto& tol = cfg.tol;
    os << "\n[tolerances]\n";
    os << "eigenvalue = " << format_double(tol.eigenvalue) << "\n";
    os << "cluster = " << format_double(tol.cluster) << "\n";
    os << "degeneracy = " << format_double(tol.degeneracy) << "\n";
    os << "residual = " << format_double(tol.residual) << "\n";
    os << "orthogonality = " << format_double(tol.orthogonality) << "\n";
    os << "unitarity = " << format_double(tol.unitarity) << "\n";
    os << "det = " << format_double(tol.det) << "\n";
    os << "tail = " << format_double(tol.tail) << "\n";
    os << "scaling = " << format_double(tol.scaling) << "\n";
    os << "coupling_floor = " << format_double(tol.coupling_floor) << "\n";
    os << "max_inverse_iterations = " << tol.max_inverse_iterations << "\n";

    os << "\n[run]\n";
    os << "workers = " << cfg.workers << "\n";
    return os.str();
}

} // namespace oc
