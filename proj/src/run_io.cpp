#include "dirsol/run_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#ifndef DIRSOL_VERSION
#define DIRSOL_VERSION "unknown"
#endif

namespace dirsol {

namespace pt = boost::property_tree;

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

std::string vec_to_string(const Vec3& v) {
    std::ostringstream os;
    os << std::setprecision(17) << v[0] << ", " << v[1] << ", " << v[2];
    return os.str();
}

Vec3 vec_from_string(const std::string& s) {
    Vec3 v;
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream is(t);
    if (!(is >> v[0] >> v[1] >> v[2])) throw std::invalid_argument("expected three numbers, got '" + s + "'");
    std::string rest;
    if (is >> rest) throw std::invalid_argument("expected three numbers, got '" + s + "'");
    return v;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "grid.L",           "grid.N",           "rho.amplitude",      "rho.sigma",     "rho.mass",
        "run.kind",         "run.dt",           "run.T",              "run.nu",        "run.seed",
        "run.threads",      "run.track_stride", "run.sample_stride",  "soliton.b",     "soliton.v",
        "perturbation.epsilon", "perturbation.width", "fit.t_min",    "fit.t_max"};
    return keys;
}

// ptree::get with a default swallows malformed values; this one does not.
template <class T>
void read_value(const pt::ptree& tree, const char* key, T& out) {
    if (tree.get_child_optional(key)) out = tree.get<T>(key);
}

}  // namespace

RunConfig load_config(const fs::path& path, RunConfig c) {
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside a section");
        for (const auto& [key, _] : body)
            if (!known_keys().count(section + "." + key))
                throw std::invalid_argument("config: unknown key '" + section + "." + key + "'");
    }
    try {
        read_value(tree, "grid.L", c.grid.L);
        read_value(tree, "grid.N", c.grid.N);
        read_value(tree, "rho.amplitude", c.rho.amplitude);
        read_value(tree, "rho.sigma", c.rho.sigma);
        read_value(tree, "rho.mass", c.rho.mass);
        if (auto k = tree.get_optional<std::string>("run.kind")) c.kind = experiment_kind_from_string(*k);
        read_value(tree, "run.dt", c.dt);
        read_value(tree, "run.T", c.T);
        read_value(tree, "run.nu", c.nu);
        read_value(tree, "run.seed", c.seed);
        read_value(tree, "run.threads", c.threads);
        read_value(tree, "run.track_stride", c.track_stride);
        read_value(tree, "run.sample_stride", c.sample_stride);
        if (auto b = tree.get_optional<std::string>("soliton.b")) c.b = vec_from_string(*b);
        if (auto v = tree.get_optional<std::string>("soliton.v")) c.v = vec_from_string(*v);
        read_value(tree, "perturbation.epsilon", c.epsilon);
        read_value(tree, "perturbation.width", c.packet_width);
        read_value(tree, "fit.t_min", c.fit_t_min);
        read_value(tree, "fit.t_max", c.fit_t_max);
    } catch (const pt::ptree_bad_data& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return c;
}

void save_config(const fs::path& path, const RunConfig& c) {
    pt::ptree tree;
    auto num = [](double x) {
        std::ostringstream os;
        os << std::setprecision(17) << x;
        return os.str();
    };
    tree.put("grid.L", num(c.grid.L));
    tree.put("grid.N", c.grid.N);
    tree.put("rho.amplitude", num(c.rho.amplitude));
    tree.put("rho.sigma", num(c.rho.sigma));
    tree.put("rho.mass", num(c.rho.mass));
    tree.put("run.kind", to_string(c.kind));
    tree.put("run.dt", num(c.dt));
    tree.put("run.T", num(c.T));
    tree.put("run.nu", num(c.nu));
    tree.put("run.seed", c.seed);
    tree.put("run.threads", c.threads);
    tree.put("run.track_stride", num(c.track_stride));
    tree.put("run.sample_stride", num(c.sample_stride));
    tree.put("soliton.b", vec_to_string(c.b));
    tree.put("soliton.v", vec_to_string(c.v));
    tree.put("perturbation.epsilon", num(c.epsilon));
    tree.put("perturbation.width", num(c.packet_width));
    tree.put("fit.t_min", num(c.fit_t_min));
    tree.put("fit.t_max", num(c.fit_t_max));
    pt::write_ini(path.string(), tree);
}

std::string code_version() { return DIRSOL_VERSION; }

nlohmann::json config_to_json(const RunConfig& c) {
    auto vec = [](const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); };
    return {{"grid", {{"L", c.grid.L}, {"N", c.grid.N}}},
            {"rho", {{"amplitude", c.rho.amplitude}, {"sigma", c.rho.sigma}, {"mass", c.rho.mass}}},
            {"run",
             {{"kind", to_string(c.kind)},
              {"dt", c.dt},
              {"T", c.T},
              {"nu", c.nu},
              {"seed", c.seed},
              {"threads", c.threads},
              {"track_stride", c.track_stride},
              {"sample_stride", c.sample_stride}}},
            {"soliton", {{"b", vec(c.b)}, {"v", vec(c.v)}}},
            {"perturbation", {{"epsilon", c.epsilon}, {"width", c.packet_width}}},
            {"fit", {{"t_min", c.fit_t_min}, {"t_max", c.fit_t_max}}}};
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << std::setw(2) << j << '\n';
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const nlohmann::json& results) {
    fs::create_directories(dir);
    save_config(dir / "config.ini", cfg);
    nlohmann::json m = {{"code_version", code_version()},
                        {"config", config_to_json(cfg)},
                        {"config_file", "config.ini"},
                        {"seed", cfg.seed},
                        {"threads", cfg.threads},
                        {"results", results}};
    write_json(dir / "manifest.json", m);
}

namespace {

std::ofstream open_csv(const fs::path& path, const char* header) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << header << '\n' << std::setprecision(17);
    return os;
}

}  // namespace

void write_particle_csv(const fs::path& path, const Trajectory& tr) {
    auto os = open_csv(path, "t,q1,q2,q3,p1,p2,p3");
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << tr.times[i];
        for (int j = 0; j < 3; ++j) os << ',' << tr.q[i][j];
        for (int j = 0; j < 3; ++j) os << ',' << tr.p[i][j];
        os << '\n';
    }
}

void write_modulation_csv(const fs::path& path, const Trajectory& tr) {
    auto os = open_csv(path, "t,b1,b2,b3,v1,v2,v3,z_norm,majorant,iterations");
    for (const auto& m : tr.modulation) {
        os << m.t;
        for (int j = 0; j < 3; ++j) os << ',' << m.sigma.b[j];
        for (int j = 0; j < 3; ++j) os << ',' << m.sigma.v[j];
        os << ',' << m.z_norm << ',' << m.majorant << ',' << m.iterations << '\n';
    }
}

void write_decay_csv(const fs::path& path, const DecayReport& r) {
    auto os = open_csv(path, "t,weighted_norm");
    for (std::size_t i = 0; i < r.times.size(); ++i) os << r.times[i] << ',' << r.norms[i] << '\n';
}

void write_snapshot(const fs::path& dir, const std::string& stem, double t, const PhaseState& Y) {
    fs::create_directories(dir);
    const SpinorField u = Y.psi.to_position();
    const fs::path bin = dir / (stem + ".bin");
    std::ofstream os(bin, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + bin.string());
    os.write(reinterpret_cast<const char*>(u.data().data()),
             static_cast<std::streamsize>(u.data().size() * sizeof(cplx)));
    const GridSpec& g = u.grid();
    nlohmann::json d = {{"file", stem + ".bin"},
                        {"dtype", "<f8"},
                        {"layout", "point-major (i, j, k), 4 spinor components, (re, im) pairs"},
                        {"representation", "position"},
                        {"t", t},
                        {"grid", {{"L", g.L}, {"N", g.N}}},
                        {"q", {Y.q[0], Y.q[1], Y.q[2]}},
                        {"p", {Y.p[0], Y.p[1], Y.p[2]}}};
    write_json(dir / (stem + ".json"), d);
}

PhaseState load_snapshot(const fs::path& descriptor) {
    std::ifstream is(descriptor);
    if (!is) throw std::invalid_argument("cannot read " + descriptor.string());
    nlohmann::json d;
    try {
        d = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("snapshot descriptor: " + std::string(e.what()));
    }
    if (d.value("dtype", "") != "<f8" || d.value("representation", "") != "position")
        throw std::invalid_argument("snapshot descriptor: unsupported dtype or representation");
    GridSpec g{d.at("grid").at("L").get<double>(), d.at("grid").at("N").get<int>()};
    g.validate();
    PhaseState Y = PhaseState::zero(g, Rep::Position);
    for (int j = 0; j < 3; ++j) {
        Y.q[j] = d.at("q").at(j).get<double>();
        Y.p[j] = d.at("p").at(j).get<double>();
    }
    const fs::path bin = descriptor.parent_path() / d.at("file").get<std::string>();
    std::ifstream bs(bin, std::ios::binary);
    const auto bytes = static_cast<std::streamsize>(Y.psi.data().size() * sizeof(cplx));
    if (!bs || fs::file_size(bin) != static_cast<std::uintmax_t>(bytes))
        throw std::invalid_argument("snapshot payload missing or of wrong size: " + bin.string());
    bs.read(reinterpret_cast<char*>(Y.psi.data().data()), bytes);
    return Y;
}

}  // namespace dirsol
